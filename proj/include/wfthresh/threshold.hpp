#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfthresh/lp.hpp"
#include "wfthresh/workflow.hpp"

namespace wfthresh {

/// conc(M) = sum of M over D.
std::uint64_t conc(const WorkflowNet& wf, const Marking& m);

/// A reachable marking together with a firing sequence reaching it.
struct Witness {
  Marking marking;
  std::vector<TransitionIndex> sequence;
  std::uint64_t value = 0;  // conc(marking)
};

struct ExactCtResult {
  std::optional<std::uint64_t> value;  // present iff exploration completed
  Witness best;                        // best marking seen (partial max if incomplete)
  std::size_t states = 0;
  bool overflowed = false;
};

/// CT(N) by exhaustive breadth-first exploration of reach(M_I).
ExactCtResult exact_ct(const WorkflowNet& wf, std::size_t limit = kDefaultStateLimit);

/// n(n+1)(n+2)/6, saturating.
std::uint64_t shortest_sequence_bound(std::size_t transitions);

/// The shortest-sequence cap when the net is free-choice and passes the
/// soundness check within `limit` states, otherwise nothing.
std::optional<std::uint64_t> auto_depth_cap(const WorkflowNet& wf, std::size_t limit = kDefaultStateLimit);

struct SearchOutcome {
  std::optional<Witness> witness;
  /// Every marking reachable within the depth cap was examined.
  bool complete = false;
  std::size_t states = 0;
};

/// Best-first search (largest conc first) for a marking with conc >= k,
/// restricted to sequences of length <= depth_cap when one is given.
SearchOutcome ct_at_least(const WorkflowNet& wf, std::uint64_t k, std::optional<std::uint64_t> depth_cap,
                          std::size_t limit = kDefaultStateLimit);

struct BoundsMethod {
  bool exploration_complete = false;
  bool lp_used = false;
  LpStatus rational_status = LpStatus::optimal;
  LpStatus integer_status = LpStatus::optimal;
  std::string lower_source;  // "initial", "lp-guided", "search"
  std::optional<std::uint64_t> depth_cap;
};

struct ThresholdReport {
  Witness lower;
  std::optional<Rational> upper_rational;      // absent unless the relaxation is optimal
  std::optional<std::uint64_t> upper_integer;  // absent unless the integer program is solved
  std::optional<std::uint64_t> exact;
  std::vector<Rational> integer_x;  // X block of the integer optimum
  BoundsMethod method;
  std::size_t states_explored = 0;
  std::uint64_t lp_pivots = 0;
  std::uint64_t ilp_nodes = 0;

  /// The integer upper bound exceeds the exact value.
  bool lp_gap() const { return exact && upper_integer && *upper_integer > *exact; }
  bool rational_equals_integer() const {
    return upper_rational && upper_integer && *upper_rational == Rational(static_cast<unsigned long>(*upper_integer));
  }
};

struct BoundsOptions {
  std::size_t limit = 1'000'000;
  std::uint64_t ilp_node_limit = 200000;
  std::uint64_t guided_node_limit = 200000;
  /// Bound on the length of explored firing sequences.
  std::optional<std::uint64_t> depth_cap;
  /// Every reachable marking is reachable within depth_cap.
  bool depth_cap_sufficient = false;
};

/// Integer and rational marking-equation bounds plus a lower bound from
/// LP-guided replay and best-first exploration.
ThresholdReport combined_bounds(const WorkflowNet& wf, const BoundsOptions& options = {});

}  // namespace wfthresh
