#include "wfthresh/record.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace wfthresh {

using nlohmann::ordered_json;

bool AnalysisRecord::inconclusive() const {
  return soundness.verdict == Verdict::unknown || !bounds.exact || rt.status == "too-many-runs";
}

namespace {

template <class F>
auto timed(std::map<std::string, double>& timings, const char* phase, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = f();
  timings[phase] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::sound: return "sound";
    case Verdict::unsound: return "unsound";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::empty_inputs: return "empty-inputs";
    case ViolationKind::empty_outputs: return "empty-outputs";
    case ViolationKind::input_has_producer: return "input-has-producer";
    case ViolationKind::output_has_consumer: return "output-has-consumer";
    case ViolationKind::off_path: return "off-path";
  }
  return "?";
}

ordered_json sequence_json(const PetriNet& net, const std::vector<TransitionIndex>& seq) {
  ordered_json out = ordered_json::array();
  for (TransitionIndex t : seq) out.push_back(net.transition_name(t));
  return out;
}

ordered_json marking_json(const PetriNet& net, const Marking& m) {
  ordered_json out = ordered_json::object();
  for (PlaceIndex p : m.support()) out[net.place_name(p)] = m[p];
  return out;
}

}  // namespace

AnalysisRecord analyze(const std::string& name, const WorkflowNet& wf, const AnalysisOptions& options) {
  AnalysisRecord r;
  r.name = name;
  const PetriNet& net = wf.net();
  r.places = net.num_places();
  r.transitions = net.num_transitions();
  timed(r.timings_ms, "classify", [&] {
    r.marked_graph = is_marked_graph(net);
    r.free_choice = is_free_choice(net);
    r.acyclic = is_acyclic(net);
    r.violations = validate_workflow(wf);
    return 0;
  });
  r.soundness = timed(r.timings_ms, "soundness", [&] { return check_soundness(wf, options.state_limit); });
  r.bounds = timed(r.timings_ms, "bounds", [&] {
    BoundsOptions b;
    b.limit = options.state_limit;
    return combined_bounds(wf, b);
  });
  if (options.compute_rt) {
    timed(r.timings_ms, "rt", [&] {
      if (!r.acyclic) {
        r.rt.status = "cyclic";
      } else if (!r.soundness.sound()) {
        r.rt.status = "unsound";
      } else {
        const auto runs = enumerate_runs(wf, options.runs_limit);
        if (runs.truncated) {
          r.rt.status = "too-many-runs";
        } else {
          std::size_t best = 0;
          for (const auto& run : runs.runs) {
            auto res = resource_threshold_run(run, wf.durations());
            best = std::max(best, res.threshold);
            r.rt.runs.emplace_back(canonical_sequence(run), std::move(res));
          }
          r.rt.value = best;
          r.rt.status = "computed";
        }
      }
      return 0;
    });
  }
  return r;
}

ordered_json witness_json(const WorkflowNet& wf, const Witness& w) {
  ordered_json j;
  j["value"] = w.value;
  j["marking"] = marking_json(wf.net(), w.marking);
  j["sequence"] = sequence_json(wf.net(), w.sequence);
  return j;
}

ordered_json bounds_json(const WorkflowNet& wf, const ThresholdReport& r) {
  ordered_json j;
  j["exact"] = r.exact ? ordered_json(*r.exact) : ordered_json(nullptr);
  j["lower"] = r.lower.value;
  j["upper_integer"] = r.upper_integer ? ordered_json(*r.upper_integer) : ordered_json(nullptr);
  j["upper_rational"] = r.upper_rational ? ordered_json(to_fraction_string(*r.upper_rational)) : ordered_json(nullptr);
  j["lp_gap"] = r.lp_gap();
  j["rational_equals_integer"] = r.rational_equals_integer();
  j["witness"] = witness_json(wf, r.lower);
  ordered_json x = ordered_json::object();
  for (std::size_t t = 0; t < r.integer_x.size(); ++t)
    if (sgn(r.integer_x[t]) != 0) x[wf.net().transition_name(t)] = to_fraction_string(r.integer_x[t]);
  j["integer_x"] = x;
  ordered_json m;
  m["exploration_complete"] = r.method.exploration_complete;
  m["lp_used"] = r.method.lp_used;
  m["rational_status"] = to_string(r.method.rational_status);
  m["integer_status"] = to_string(r.method.integer_status);
  m["lower_source"] = r.method.lower_source;
  m["depth_cap"] = r.method.depth_cap ? ordered_json(*r.method.depth_cap) : ordered_json(nullptr);
  j["method"] = m;
  j["states_explored"] = r.states_explored;
  j["lp_pivots"] = r.lp_pivots;
  j["ilp_nodes"] = r.ilp_nodes;
  return j;
}

ordered_json to_json(const WorkflowNet& wf, const AnalysisRecord& r) {
  const PetriNet& net = wf.net();
  ordered_json j;
  j["name"] = r.name;
  j["places"] = r.places;
  j["transitions"] = r.transitions;
  j["classification"] = {{"marked_graph", r.marked_graph}, {"free_choice", r.free_choice}, {"acyclic", r.acyclic}};
  ordered_json v = ordered_json::array();
  for (const auto& s : r.violations)
    v.push_back({{"kind", to_string(s.kind)}, {"node", s.node}, {"message", s.message}});
  j["structural_violations"] = v;

  ordered_json s;
  s["verdict"] = to_string(r.soundness.verdict);
  s["one_safe"] = r.soundness.one_safe;
  s["violated_condition"] =
      r.soundness.violated_condition ? ordered_json(to_string(*r.soundness.violated_condition)) : ordered_json(nullptr);
  s["witness"] = r.soundness.witness ? sequence_json(net, *r.soundness.witness) : ordered_json(nullptr);
  s["dead_transitions"] = sequence_json(net, r.soundness.dead_transitions);
  s["states"] = r.soundness.states_explored;
  j["soundness"] = s;

  j["threshold"] = bounds_json(wf, r.bounds);

  ordered_json rt;
  rt["status"] = r.rt.status.empty() ? "skipped" : r.rt.status;
  rt["value"] = r.rt.value ? ordered_json(*r.rt.value) : ordered_json(nullptr);
  ordered_json runs = ordered_json::array();
  for (const auto& [seq, res] : r.rt.runs)
    runs.push_back({{"run", sequence_json(net, seq)}, {"t_min", res.deadline}, {"threshold", res.threshold}});
  rt["runs"] = runs;
  j["resource_threshold"] = rt;

  ordered_json t = ordered_json::object();
  for (const auto& [phase, ms] : r.timings_ms) t[phase] = ms;
  j["timings_ms"] = t;
  return j;
}

namespace {

ordered_json aggregate(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const double median = n % 2 == 1 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
  double sum = 0;
  for (double x : xs) sum += x;
  return {{"median", median}, {"mean", sum / static_cast<double>(n)}, {"max", xs.back()}};
}

}  // namespace

ordered_json report(const std::vector<AnalysisRecord>& records) {
  if (records.empty()) throw std::invalid_argument("report needs at least one record");
  std::vector<double> places, transitions, ct;
  std::map<std::string, std::vector<double>> times;
  std::size_t exact = 0;
  for (const auto& r : records) {
    places.push_back(static_cast<double>(r.places));
    transitions.push_back(static_cast<double>(r.transitions));
    ct.push_back(static_cast<double>(r.bounds.exact.value_or(r.bounds.lower.value)));
    if (r.bounds.exact) ++exact;
    double total = 0;
    for (const auto& [phase, ms] : r.timings_ms) {
      times[phase].push_back(ms);
      total += ms;
    }
    times["total"].push_back(total);
  }
  ordered_json j;
  j["nets"] = records.size();
  j["exact"] = exact;
  j["places"] = aggregate(places);
  j["transitions"] = aggregate(transitions);
  j["concurrency_threshold"] = aggregate(ct);
  ordered_json t;
  for (auto& [phase, xs] : times) t[phase] = aggregate(xs);
  j["timings_ms"] = t;
  return j;
}

ordered_json strip_timings(ordered_json j) {
  if (j.is_object()) {
    j.erase("timings_ms");
    for (auto& [key, value] : j.items()) value = strip_timings(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timings(value);
  }
  return j;
}

}  // namespace wfthresh
