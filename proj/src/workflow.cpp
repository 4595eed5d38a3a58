#include "wfthresh/workflow.hpp"

#include <algorithm>
#include <deque>

#include "wfthresh/explore.hpp"

namespace wfthresh {

const char* to_string(DPolicy policy) {
  switch (policy) {
    case DPolicy::positive: return "positive";
    case DPolicy::all_but_output: return "all-but-output";
    case DPolicy::explicit_set: return "explicit";
  }
  return "?";
}

const char* to_string(SoundnessCondition c) {
  switch (c) {
    case SoundnessCondition::option_to_complete: return "option-to-complete";
    case SoundnessCondition::proper_completion: return "proper-completion";
    case SoundnessCondition::no_dead_transition: return "no-dead-transition";
    case SoundnessCondition::state_limit: return "state-limit";
  }
  return "?";
}

WorkflowNet::WorkflowNet(PetriNet net, std::vector<PlaceIndex> inputs, std::vector<PlaceIndex> outputs,
                         std::vector<Duration> durations)
    : net_(std::move(net)), inputs_(std::move(inputs)), outputs_(std::move(outputs)), durations_(std::move(durations)) {
  if (durations_.empty()) durations_.assign(net_.num_places(), 0);
  if (durations_.size() != net_.num_places()) throw NetError("duration vector size does not match places");
  for (PlaceIndex p : inputs_)
    if (p >= net_.num_places()) throw NetError("input place out of range");
  for (PlaceIndex p : outputs_)
    if (p >= net_.num_places()) throw NetError("output place out of range");
  auto unique = [](std::vector<PlaceIndex> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (!unique(inputs_)) throw NetError("duplicate input place");
  if (!unique(outputs_)) throw NetError("duplicate output place");
}

void WorkflowNet::set_d_policy(DPolicy policy, std::vector<PlaceIndex> explicit_d) {
  for (PlaceIndex p : explicit_d)
    if (p >= net_.num_places()) throw NetError("D place out of range");
  if (policy != DPolicy::explicit_set && !explicit_d.empty())
    throw NetError("explicit D given with a non-explicit policy");
  std::sort(explicit_d.begin(), explicit_d.end());
  explicit_d.erase(std::unique(explicit_d.begin(), explicit_d.end()), explicit_d.end());
  policy_ = policy;
  explicit_d_ = std::move(explicit_d);
}

std::vector<bool> WorkflowNet::d_mask() const {
  std::vector<bool> mask(net_.num_places(), false);
  switch (policy_) {
    case DPolicy::positive:
      for (PlaceIndex p = 0; p < mask.size(); ++p) mask[p] = durations_[p] > 0;
      break;
    case DPolicy::all_but_output:
      mask.assign(mask.size(), true);
      for (PlaceIndex p : outputs_) mask[p] = false;
      break;
    case DPolicy::explicit_set:
      for (PlaceIndex p : explicit_d_) mask[p] = true;
      break;
  }
  return mask;
}

std::vector<PlaceIndex> WorkflowNet::d_places() const {
  const auto mask = d_mask();
  std::vector<PlaceIndex> out;
  for (PlaceIndex p = 0; p < mask.size(); ++p)
    if (mask[p]) out.push_back(p);
  return out;
}

namespace {

// Nodes reachable in the flow graph; places are [0, |P|), transitions follow.
std::vector<bool> flow_closure(const PetriNet& net, const std::vector<PlaceIndex>& seeds, bool forward) {
  const std::size_t np = net.num_places();
  std::vector<bool> seen(np + net.num_transitions(), false);
  std::vector<std::size_t> stack;
  for (PlaceIndex p : seeds) {
    if (!seen[p]) {
      seen[p] = true;
      stack.push_back(p);
    }
  }
  auto visit = [&](std::size_t v) {
    if (!seen[v]) {
      seen[v] = true;
      stack.push_back(v);
    }
  };
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (v < np) {
      for (TransitionIndex t : forward ? net.consumers(v) : net.producers(v)) visit(np + t);
    } else {
      for (PlaceIndex p : forward ? net.post(v - np) : net.pre(v - np)) visit(p);
    }
  }
  return seen;
}

}  // namespace

std::vector<StructuralViolation> validate_workflow(const WorkflowNet& wf) {
  const PetriNet& net = wf.net();
  std::vector<StructuralViolation> out;
  if (wf.inputs().empty()) out.push_back({ViolationKind::empty_inputs, "", "input set is empty"});
  if (wf.outputs().empty()) out.push_back({ViolationKind::empty_outputs, "", "output set is empty"});
  for (PlaceIndex p : wf.inputs())
    if (!net.producers(p).empty())
      out.push_back({ViolationKind::input_has_producer, net.place_name(p),
                     "input place '" + net.place_name(p) + "' has an incoming arc"});
  for (PlaceIndex p : wf.outputs())
    if (!net.consumers(p).empty())
      out.push_back({ViolationKind::output_has_consumer, net.place_name(p),
                     "output place '" + net.place_name(p) + "' has an outgoing arc"});

  const auto from_inputs = flow_closure(net, wf.inputs(), true);
  const auto to_outputs = flow_closure(net, wf.outputs(), false);
  const std::size_t np = net.num_places();
  for (std::size_t v = 0; v < from_inputs.size(); ++v) {
    if (from_inputs[v] && to_outputs[v]) continue;
    const std::string& name = v < np ? net.place_name(v) : net.transition_name(v - np);
    std::string why = !from_inputs[v] ? "not reachable from an input place" : "cannot reach an output place";
    out.push_back({ViolationKind::off_path, name, "node '" + name + "' " + why});
  }
  return out;
}

namespace {

std::string fresh_name(const PetriNet& net, std::string base) {
  std::string name = base;
  for (int k = 1; net.find_place(name) || net.find_transition(name); ++k) name = base + "_" + std::to_string(k);
  return name;
}

PetriNet copy_net(const PetriNet& src) {
  PetriNet net;
  for (PlaceIndex p = 0; p < src.num_places(); ++p) net.add_place(src.place_name(p));
  for (TransitionIndex t = 0; t < src.num_transitions(); ++t)
    net.add_transition(src.transition_name(t), src.pre(t), src.post(t));
  return net;
}

}  // namespace

WorkflowNet normalize_single_entry_exit(const WorkflowNet& wf) {
  const auto violations = validate_workflow(wf);
  if (!violations.empty()) throw NetError("not a workflow net: " + violations.front().message);
  if (wf.inputs().size() == 1 && wf.outputs().size() == 1) return wf;

  PetriNet net = copy_net(wf.net());
  std::vector<Duration> tau = wf.durations();
  const PlaceIndex i = net.add_place(fresh_name(net, "i"));
  tau.push_back(0);
  const PlaceIndex o = net.add_place(fresh_name(net, "o"));
  tau.push_back(0);
  const std::vector<PlaceIndex> entry{i}, exit{o};
  net.add_transition(fresh_name(net, "t_i"), entry, wf.inputs());
  net.add_transition(fresh_name(net, "t_o"), wf.outputs(), exit);

  WorkflowNet out(std::move(net), {i}, {o}, std::move(tau));
  if (wf.d_policy() == DPolicy::all_but_output) {
    // Old outputs are interior now; keep D equal to the original D.
    auto d = wf.d_places();
    out.set_d_policy(DPolicy::explicit_set, std::move(d));
  } else {
    out.set_d_policy(wf.d_policy(), wf.explicit_d());
  }
  return out;
}

PetriNet short_circuit(const WorkflowNet& wf) {
  PetriNet net = copy_net(wf.net());
  net.add_transition(fresh_name(net, "t_bar"), wf.outputs(), wf.inputs());
  return net;
}

SoundnessReport check_soundness(const WorkflowNet& wf, std::size_t limit) {
  const PetriNet& net = wf.net();
  SoundnessReport report;
  const auto graph = explore(net, wf.initial_marking(), {.limit = limit, .record_edges = true});
  report.states_explored = graph.size();
  if (!graph.complete()) {
    report.verdict = Verdict::unknown;
    report.violated_condition = SoundnessCondition::state_limit;
    return report;
  }

  const auto& outputs = wf.outputs();
  const Marking final_marking = wf.final_marking();
  const auto final_packed = StateStore::pack(final_marking);

  std::uint16_t max_tokens = 0;
  std::optional<StateId> improper;
  std::vector<bool> fired(net.num_transitions(), false);
  for (StateId s = 0; s < graph.size(); ++s) {
    const auto state = graph.state(s);
    max_tokens = std::max(max_tokens, *std::max_element(state.begin(), state.end(), std::less<>{}));
    std::uint64_t in_outputs = 0;
    for (PlaceIndex p : outputs) in_outputs += state[p];
    if (!improper && in_outputs >= outputs.size() && !std::equal(state.begin(), state.end(), final_packed.begin()))
      improper = s;
    for (const Edge& e : graph.successors(s)) fired[e.transition] = true;
  }
  report.one_safe = max_tokens <= 1;
  for (TransitionIndex t = 0; t < fired.size(); ++t)
    if (!fired[t]) report.dead_transitions.push_back(t);

  if (improper) {
    report.verdict = Verdict::unsound;
    report.violated_condition = SoundnessCondition::proper_completion;
    report.witness = graph.path_to(*improper);
    return report;
  }

  // Backward search from M_O over the reversed reachability graph.
  std::vector<bool> coreachable(graph.size(), false);
  if (auto target = graph.find(final_marking)) {
    std::vector<std::size_t> offsets(graph.size() + 1, 0);
    for (StateId s = 0; s < graph.size(); ++s)
      for (const Edge& e : graph.successors(s)) ++offsets[e.target + 1];
    for (std::size_t k = 1; k < offsets.size(); ++k) offsets[k] += offsets[k - 1];
    std::vector<StateId> preds(offsets.back());
    auto fill = offsets;
    for (StateId s = 0; s < graph.size(); ++s)
      for (const Edge& e : graph.successors(s)) preds[fill[e.target]++] = s;
    std::deque<StateId> queue{*target};
    coreachable[*target] = true;
    while (!queue.empty()) {
      const StateId s = queue.front();
      queue.pop_front();
      for (std::size_t k = offsets[s]; k < offsets[s + 1]; ++k) {
        if (!coreachable[preds[k]]) {
          coreachable[preds[k]] = true;
          queue.push_back(preds[k]);
        }
      }
    }
  }
  for (StateId s = 0; s < graph.size(); ++s) {
    if (!coreachable[s]) {
      report.verdict = Verdict::unsound;
      report.violated_condition = SoundnessCondition::option_to_complete;
      report.witness = graph.path_to(s);
      return report;
    }
  }
  if (!report.dead_transitions.empty()) {
    report.verdict = Verdict::unsound;
    report.violated_condition = SoundnessCondition::no_dead_transition;
    return report;
  }
  report.verdict = Verdict::sound;
  return report;
}

}  // namespace wfthresh
