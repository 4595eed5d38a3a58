#include "helpers.hpp"

#include <sstream>
#include <stdexcept>

namespace wfthresh::testing {

WorkflowNet edit_net(const WorkflowNet& wf, std::string_view line, std::string_view replacement) {
  std::istringstream in(render_net(wf));
  std::string out, cur;
  bool hit = false;
  while (std::getline(in, cur)) {
    if (cur == line) {
      hit = true;
      if (replacement.empty()) continue;
      cur = replacement;
    }
    out += cur + "\n";
  }
  if (!hit) throw std::invalid_argument("line not found: " + std::string(line));
  return parse_net(out);
}

OccPlace occ(const Process& p, std::string_view label) {
  const PlaceIndex want = p.base().place(label);
  std::optional<OccPlace> found;
  for (OccPlace q = 0; q < p.num_places(); ++q) {
    if (p.place(q).label != want) continue;
    if (found) throw std::invalid_argument("label occurs twice: " + std::string(label));
    found = q;
  }
  if (!found) throw std::invalid_argument("label absent: " + std::string(label));
  return *found;
}

Schedule schedule_by_label(const Process& p, const std::map<std::string, Time>& start) {
  Schedule f;
  f.start.assign(p.num_places(), 0);
  std::size_t covered = 0;
  for (const auto& [label, t] : start) {
    f.start[occ(p, label)] = t;
    ++covered;
  }
  if (covered != p.num_places()) throw std::invalid_argument("schedule does not cover the process");
  return f;
}

const Process& run_with(const std::vector<Process>& runs, std::string_view transition) {
  for (const Process& r : runs) {
    const TransitionIndex t = r.base().transition(transition);
    for (OccTransition e = 0; e < r.num_transitions(); ++e)
      if (r.transition(e).label == t) return r;
  }
  throw std::invalid_argument("no run fires " + std::string(transition));
}

std::vector<std::string> names(const PetriNet& net, const std::vector<TransitionIndex>& seq) {
  std::vector<std::string> out;
  for (TransitionIndex t : seq) out.push_back(net.transition_name(t));
  return out;
}

}  // namespace wfthresh::testing
