#include "wfthresh/process.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace wfthresh {

std::vector<OccPlace> Process::minimal_places() const {
  std::vector<OccPlace> out;
  for (OccPlace p = 0; p < places_.size(); ++p)
    if (!places_[p].producer) out.push_back(p);
  return out;
}

std::vector<OccPlace> Process::maximal_places() const {
  std::vector<OccPlace> out;
  for (OccPlace p = 0; p < places_.size(); ++p)
    if (!places_[p].consumer) out.push_back(p);
  return out;
}

std::optional<OccPlace> Process::maximal_with_label(PlaceIndex label) const {
  for (OccPlace p = 0; p < places_.size(); ++p)
    if (!places_[p].consumer && places_[p].label == label) return p;
  return std::nullopt;
}

std::span<const OccPlace> Process::place_predecessors(OccPlace p) const {
  const auto& producer = places_.at(p).producer;
  if (!producer) return {};
  return transitions_[*producer].preset;
}

bool Process::precedes(OccPlace p, OccPlace q) const {
  if (p == q) return false;
  std::vector<bool> seen(places_.size(), false);
  std::vector<OccPlace> stack{q};
  while (!stack.empty()) {
    const OccPlace cur = stack.back();
    stack.pop_back();
    for (OccPlace pred : place_predecessors(cur)) {
      if (pred == p) return true;
      if (!seen[pred]) {
        seen[pred] = true;
        stack.push_back(pred);
      }
    }
  }
  return false;
}

std::vector<TransitionIndex> Process::creation_sequence() const {
  std::vector<TransitionIndex> out;
  out.reserve(transitions_.size());
  for (const auto& t : transitions_) out.push_back(t.label);
  return out;
}

Process initial_process(const PetriNet& net, const Marking& m0) {
  if (m0.size() != net.num_places()) throw ProcessError("marking size does not match net");
  Process p;
  p.net_ = &net;
  p.initial_ = m0;
  for (PlaceIndex q = 0; q < m0.size(); ++q) {
    if (m0[q] > 1) throw ProcessError("initial marking is not 1-safe at '" + net.place_name(q) + "'");
    if (m0[q] == 1) p.places_.push_back({q, std::nullopt, std::nullopt});
  }
  return p;
}

Process extend(const Process& p, const CausalCut& cut, TransitionIndex t) {
  const PetriNet& net = p.base();
  if (t >= net.num_transitions()) throw ProcessError("unknown transition index");
  std::vector<PlaceIndex> labels;
  for (OccPlace q : cut) {
    if (q >= p.num_places()) throw ProcessError("cut refers to an unknown place");
    if (p.place(q).consumer) throw ProcessError("cut place is not causally maximal");
    labels.push_back(p.place(q).label);
  }
  std::vector<PlaceIndex> wanted = net.pre(t);
  std::sort(labels.begin(), labels.end());
  std::sort(wanted.begin(), wanted.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw ProcessError("cut labels are not pairwise distinct");
  if (labels != wanted) throw ProcessError("cut does not enable '" + net.transition_name(t) + "'");

  Process next = p;
  const OccTransition occ = next.transitions_.size();
  Process::Transition tr{t, cut, {}};
  for (OccPlace q : cut) next.places_[q].consumer = occ;
  for (PlaceIndex out : net.post(t)) {
    if (next.maximal_with_label(out))
      throw ProcessError("system is not 1-safe: '" + net.place_name(out) + "' would carry two tokens");
    tr.postset.push_back(next.places_.size());
    next.places_.push_back({out, occ, std::nullopt});
  }
  next.transitions_.push_back(std::move(tr));
  return next;
}

Process process_from_sequence(const PetriNet& net, const Marking& m0, std::span<const TransitionIndex> seq) {
  Process p = initial_process(net, m0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const TransitionIndex t = seq[i];
    if (t >= net.num_transitions()) throw ProcessError("unknown transition index");
    CausalCut cut;
    for (PlaceIndex q : net.pre(t)) {
      auto occ = p.maximal_with_label(q);
      if (!occ) throw FiringError(i, net.transition_name(t));
      cut.push_back(*occ);
    }
    p = extend(p, cut, t);
  }
  return p;
}

Marking final_marking(const Process& p) {
  Marking m(p.base().num_places());
  for (OccPlace q : p.maximal_places()) m[p.place(q).label] += 1;
  return m;
}

bool is_run(const WorkflowNet& wf, const Process& p) { return final_marking(p) == wf.final_marking(); }

std::vector<TransitionIndex> canonical_sequence(const Process& p) {
  const std::size_t n = p.num_transitions();
  std::vector<std::size_t> missing(n);
  for (OccTransition t = 0; t < n; ++t) {
    missing[t] = 0;
    for (OccPlace q : p.transition(t).preset)
      if (p.place(q).producer) ++missing[t];
  }
  std::vector<bool> done(n, false);
  std::vector<TransitionIndex> out;
  for (std::size_t step = 0; step < n; ++step) {
    std::optional<OccTransition> best;
    for (OccTransition t = 0; t < n; ++t) {
      if (done[t] || missing[t] != 0) continue;
      if (!best || p.transition(t).label < p.transition(*best).label) best = t;
    }
    done[*best] = true;
    out.push_back(p.transition(*best).label);
    for (OccPlace q : p.transition(*best).postset)
      if (auto c = p.place(q).consumer) --missing[*c];
  }
  return out;
}

bool isomorphic(const Process& a, const Process& b) {
  if (&a.base() != &b.base() && !(a.base() == b.base())) return false;
  return a.initial_marking() == b.initial_marking() && canonical_sequence(a) == canonical_sequence(b);
}

std::vector<std::vector<TransitionIndex>> linearizations(const Process& p, std::size_t limit) {
  const std::size_t n = p.num_transitions();
  std::vector<std::size_t> missing(n, 0);
  for (OccTransition t = 0; t < n; ++t)
    for (OccPlace q : p.transition(t).preset)
      if (p.place(q).producer) ++missing[t];
  std::vector<bool> done(n, false);
  std::vector<TransitionIndex> current;
  std::vector<std::vector<TransitionIndex>> out;
  std::function<void()> rec = [&] {
    if (current.size() == n) {
      if (out.size() >= limit) throw ProcessError("too many linearizations");
      out.push_back(current);
      return;
    }
    for (OccTransition t = 0; t < n; ++t) {
      if (done[t] || missing[t] != 0) continue;
      done[t] = true;
      current.push_back(p.transition(t).label);
      for (OccPlace q : p.transition(t).postset)
        if (auto c = p.place(q).consumer) --missing[*c];
      rec();
      for (OccPlace q : p.transition(t).postset)
        if (auto c = p.place(q).consumer) ++missing[*c];
      current.pop_back();
      done[t] = false;
    }
  };
  rec();
  return out;
}

RunEnumeration enumerate_runs(const WorkflowNet& wf, std::size_t max_runs) {
  const PetriNet& net = wf.net();
  if (!is_acyclic(net)) throw NetError("run enumeration requires an acyclic net");

  const std::size_t nt = net.num_transitions();
  // dependent[a][b]: the neighbourhoods of a and b share a place.
  std::vector<std::vector<bool>> dependent(nt, std::vector<bool>(nt, false));
  {
    std::vector<std::vector<TransitionIndex>> touching(net.num_places());
    for (TransitionIndex t = 0; t < nt; ++t) {
      for (PlaceIndex q : net.pre(t)) touching[q].push_back(t);
      for (PlaceIndex q : net.post(t)) touching[q].push_back(t);
    }
    for (const auto& ts : touching)
      for (TransitionIndex a : ts)
        for (TransitionIndex b : ts) dependent[a][b] = true;
  }

  RunEnumeration result;
  const Marking target = wf.final_marking();
  std::vector<TransitionIndex> word;
  // Only words in lexicographic normal form are generated, so every
  // Mazurkiewicz trace (and hence every process) is visited once.
  std::function<void(const Marking&)> rec = [&](const Marking& m) {
    if (result.truncated) return;
    if (m == target) {
      if (result.runs.size() >= max_runs) {
        result.truncated = true;
        return;
      }
      result.runs.push_back(process_from_sequence(net, wf.initial_marking(), word));
    }
    for (TransitionIndex a = 0; a < nt; ++a) {
      if (!enabled(net, m, a)) continue;
      bool normal = true;
      for (auto it = word.rbegin(); it != word.rend(); ++it) {
        if (dependent[*it][a]) break;
        if (*it > a) {
          normal = false;
          break;
        }
      }
      if (!normal) continue;
      Marking next = m;
      for (PlaceIndex q : net.pre(a)) next[q] -= 1;
      for (PlaceIndex q : net.post(a)) next[q] += 1;
      word.push_back(a);
      rec(next);
      word.pop_back();
      if (result.truncated) return;
    }
  };
  rec(wf.initial_marking());
  return result;
}

StartTimes min_schedule(const Process& p, std::span<const Duration> tau) {
  StartTimes f(p.num_places(), 0);
  // Creation order is topological.
  for (OccPlace q = 0; q < p.num_places(); ++q) {
    Duration start = 0;
    for (OccPlace pred : p.place_predecessors(q))
      start = std::max(start, f[pred] + tau[p.place(pred).label]);
    f[q] = start;
  }
  return f;
}

Duration t_min(const Process& p, std::span<const Duration> tau) {
  const auto f = min_schedule(p, tau);
  Duration t = 0;
  for (OccPlace q : p.maximal_places()) t = std::max(t, f[q] + tau[p.place(q).label]);
  return t;
}

std::string to_dot(const Process& p) {
  const PetriNet& net = p.base();
  std::ostringstream os;
  os << "digraph process {\n";
  for (OccPlace q = 0; q < p.num_places(); ++q)
    os << "  b" << q << " [shape=circle,label=\"" << net.place_name(p.place(q).label) << "\"];\n";
  for (OccTransition t = 0; t < p.num_transitions(); ++t) {
    os << "  e" << t << " [shape=box,label=\"" << net.transition_name(p.transition(t).label) << "\"];\n";
    for (OccPlace q : p.transition(t).preset) os << "  b" << q << " -> e" << t << ";\n";
    for (OccPlace q : p.transition(t).postset) os << "  e" << t << " -> b" << q << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace wfthresh
