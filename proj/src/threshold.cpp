#include "wfthresh/threshold.hpp"

#include <functional>
#include <future>
#include <limits>
#include <queue>
#include <unordered_set>

#include "wfthresh/explore.hpp"

namespace wfthresh {

std::uint64_t conc(const WorkflowNet& wf, const Marking& m) { return m.sum(wf.d_places()); }

namespace {

std::uint64_t packed_conc(std::span<const StateStore::Cell> state, const std::vector<PlaceIndex>& d) {
  std::uint64_t c = 0;
  for (PlaceIndex p : d) c += state[p];
  return c;
}

}  // namespace

ExactCtResult exact_ct(const WorkflowNet& wf, std::size_t limit) {
  const auto d = wf.d_places();
  const auto graph = explore(wf.net(), wf.initial_marking(), {limit, false});
  ExactCtResult out;
  out.states = graph.size();
  out.overflowed = graph.overflowed();
  StateId best = 0;
  std::uint64_t best_value = packed_conc(graph.state(0), d);
  for (StateId s = 1; s < graph.size(); ++s) {
    const std::uint64_t c = packed_conc(graph.state(s), d);
    if (c > best_value) {
      best_value = c;
      best = s;
    }
  }
  out.best = {graph.marking(best), graph.path_to(best), best_value};
  if (graph.complete()) out.value = best_value;
  return out;
}

std::uint64_t shortest_sequence_bound(std::size_t transitions) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  if (transitions > kMax - 2) return kMax;
  std::uint64_t f[3] = {transitions, transitions + 1u, transitions + 2u};
  for (auto& x : f)
    if (x % 3 == 0) {
      x /= 3;
      break;
    }
  for (auto& x : f)
    if (x % 2 == 0) {
      x /= 2;
      break;
    }
  std::uint64_t v = 1;
  for (auto x : f) {
    if (x != 0 && v > kMax / x) return kMax;
    v *= x;
  }
  return v;
}

std::optional<std::uint64_t> auto_depth_cap(const WorkflowNet& wf, std::size_t limit) {
  if (!is_free_choice(wf.net())) return std::nullopt;
  if (!check_soundness(wf, limit).sound()) return std::nullopt;
  return shortest_sequence_bound(wf.net().num_transitions());
}

namespace {

struct BestFirstResult {
  Witness best;
  bool reached = false;   // best.value >= target
  bool complete = false;  // search space exhausted without hitting the limit
  std::size_t states = 0;
};

// Best-first on conc, ties in discovery order. Stops as soon as a marking
// with conc >= target is discovered.
BestFirstResult best_first(const WorkflowNet& wf, std::uint64_t target, std::optional<std::uint64_t> depth_cap,
                           std::size_t limit) {
  const PetriNet& net = wf.net();
  const auto d = wf.d_places();
  StateStore store(net.num_places());
  std::vector<StateId> parent{kNoState};
  std::vector<TransitionIndex> via{0};
  std::vector<std::uint64_t> depth{0};

  struct Entry {
    std::uint64_t value;
    std::uint64_t seq;
    std::uint64_t depth;
    StateId id;
  };
  struct Order {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.value != b.value) return a.value < b.value;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Order> open;
  std::uint64_t seq = 0;

  BestFirstResult out;
  auto path = [&](StateId id) {
    std::vector<TransitionIndex> p;
    for (; parent[id] != kNoState; id = parent[id]) p.push_back(via[id]);
    return std::vector<TransitionIndex>(p.rbegin(), p.rend());
  };
  StateId best = 0;
  auto finish = [&](bool complete) {
    out.best = {store.marking(best), path(best), packed_conc(store.get(best), d)};
    out.reached = out.best.value >= target;
    out.complete = complete;
    out.states = store.size();
    return out;
  };

  const StateId root = store.insert(StateStore::pack(wf.initial_marking())).first;
  std::uint64_t best_value = packed_conc(store.get(root), d);
  if (best_value >= target) return finish(false);
  open.push({best_value, seq++, 0, root});

  std::vector<StateStore::Cell> current, next;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (e.depth != depth[e.id]) continue;  // superseded by a shorter path
    if (depth_cap && e.depth >= *depth_cap) continue;
    const auto view = store.get(e.id);
    current.assign(view.begin(), view.end());
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      if (!enabled_packed(net, current, t)) continue;
      if (!fire_packed(net, current, t, next)) return finish(false);
      const std::uint64_t nd = e.depth + 1;
      StateId id;
      if (auto found = store.find(next)) {
        id = *found;
        if (!depth_cap || depth[id] <= nd) continue;
        depth[id] = nd;
      } else {
        if (store.size() >= limit) return finish(false);
        id = store.insert(next).first;
        parent.push_back(kNoState);
        via.push_back(0);
        depth.push_back(nd);
      }
      parent[id] = e.id;
      via[id] = t;
      const std::uint64_t c = packed_conc(store.get(id), d);
      if (c > best_value) {
        best_value = c;
        best = id;
        if (c >= target) return finish(false);
      }
      open.push({c, seq++, nd, id});
    }
  }
  return finish(true);
}

// Depth-first replay of a firing-count vector: finds an order in which
// every transition t fires exactly counts[t] times.
std::optional<std::vector<TransitionIndex>> replay_counts(const WorkflowNet& wf, std::vector<std::uint64_t> counts,
                                                          std::uint64_t node_limit) {
  const PetriNet& net = wf.net();
  struct CountsHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (auto x : v) h = (h ^ x) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_set<std::vector<std::uint64_t>, CountsHash> failed;
  std::vector<TransitionIndex> seq;
  std::uint64_t nodes = 0;
  std::uint64_t remaining = 0;
  for (auto c : counts) remaining += c;

  std::function<bool(const Marking&)> rec = [&](const Marking& m) -> bool {
    if (remaining == 0) return true;
    if (++nodes > node_limit || failed.contains(counts)) return false;
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      if (counts[t] == 0 || !enabled(net, m, t)) continue;
      --counts[t];
      --remaining;
      seq.push_back(t);
      if (rec(fire(net, m, t))) return true;
      seq.pop_back();
      ++remaining;
      ++counts[t];
      if (nodes > node_limit) return false;
    }
    failed.insert(counts);
    return false;
  };
  if (rec(wf.initial_marking())) return seq;
  return std::nullopt;
}

}  // namespace

SearchOutcome ct_at_least(const WorkflowNet& wf, std::uint64_t k, std::optional<std::uint64_t> depth_cap,
                          std::size_t limit) {
  auto r = best_first(wf, k, depth_cap, limit);
  SearchOutcome out;
  out.complete = r.complete;
  out.states = r.states;
  if (r.reached) out.witness = std::move(r.best);
  return out;
}

ThresholdReport combined_bounds(const WorkflowNet& wf, const BoundsOptions& options) {
  ThresholdReport report;
  report.method.lp_used = true;
  const MarkingLp mlp = build_marking_lp(wf);

  auto rational = std::async(std::launch::async, [&] { return solve_rational(mlp.problem); });
  const LpSolution integer = solve_integer(mlp.problem, {options.ilp_node_limit});
  const LpSolution relaxed = rational.get();

  report.method.rational_status = relaxed.status;
  report.method.integer_status = integer.status;
  report.lp_pivots = relaxed.pivots + integer.pivots;
  report.ilp_nodes = integer.nodes;
  if (relaxed.status == LpStatus::optimal) report.upper_rational = relaxed.value;
  if (integer.status == LpStatus::optimal) {
    report.upper_integer = integer.value.get_num().get_ui();
    report.integer_x.assign(integer.assignment.begin() + static_cast<std::ptrdiff_t>(mlp.places),
                            integer.assignment.end());
  }

  const Marking m0 = wf.initial_marking();
  report.lower = {m0, {}, conc(wf, m0)};
  report.method.lower_source = "initial";
  const std::uint64_t target = report.upper_integer.value_or(std::numeric_limits<std::uint64_t>::max());

  if (report.upper_integer && report.lower.value < target) {
    std::vector<std::uint64_t> counts;
    for (const auto& x : report.integer_x) counts.push_back(x.get_num().get_ui());
    if (auto seq = replay_counts(wf, counts, options.guided_node_limit)) {
      const Marking m = fire_sequence(wf.net(), m0, *seq);
      report.lower = {m, std::move(*seq), conc(wf, m)};
      report.method.lower_source = "lp-guided";
    }
  }

  if (report.lower.value < target) {
    report.method.depth_cap = options.depth_cap;
    auto r = best_first(wf, target, options.depth_cap, options.limit);
    report.states_explored = r.states;
    report.method.exploration_complete = r.complete;
    if (r.best.value > report.lower.value) {
      report.lower = std::move(r.best);
      report.method.lower_source = "search";
    }
    if (r.complete && (!options.depth_cap || options.depth_cap_sufficient)) report.exact = report.lower.value;
  }
  if (report.upper_integer && report.lower.value == *report.upper_integer) report.exact = report.lower.value;
  return report;
}

}  // namespace wfthresh
