#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wfthresh/net.hpp"
#include "wfthresh/workflow.hpp"

namespace wfthresh {

using OccPlace = std::size_t;
using OccTransition = std::size_t;

/// Causally maximal occurrence places with pairwise distinct labels.
using CausalCut = std::vector<OccPlace>;

/// Nonsequential process of a 1-safe system: an acyclic labelled marked
/// graph. Occurrence places and transitions are numbered in creation order,
/// which is a topological order of the causal relation.
class Process {
 public:
  struct Place {
    PlaceIndex label;
    std::optional<OccTransition> producer;
    std::optional<OccTransition> consumer;
  };
  struct Transition {
    TransitionIndex label;
    std::vector<OccPlace> preset;
    std::vector<OccPlace> postset;
  };

  /// The net must outlive the process.
  const PetriNet& base() const { return *net_; }
  const Marking& initial_marking() const { return initial_; }

  std::size_t num_places() const { return places_.size(); }
  std::size_t num_transitions() const { return transitions_.size(); }
  const Place& place(OccPlace p) const { return places_.at(p); }
  const Transition& transition(OccTransition t) const { return transitions_.at(t); }

  /// min(Pi) and max(Pi).
  std::vector<OccPlace> minimal_places() const;
  std::vector<OccPlace> maximal_places() const;
  /// Maximal place carrying the given label, if any.
  std::optional<OccPlace> maximal_with_label(PlaceIndex label) const;

  /// Immediate causal predecessors of an occurrence place (the preset of its producer).
  std::span<const OccPlace> place_predecessors(OccPlace p) const;
  /// Strict causal order p < q, over occurrence places.
  bool precedes(OccPlace p, OccPlace q) const;

  /// Labels of the occurrence transitions in creation order.
  std::vector<TransitionIndex> creation_sequence() const;

 private:
  friend Process initial_process(const PetriNet&, const Marking&);
  friend Process extend(const Process&, const CausalCut&, TransitionIndex);

  const PetriNet* net_ = nullptr;
  Marking initial_;
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
};

/// Raised when a process construction step is not allowed.
class ProcessError : public NetError {
 public:
  using NetError::NetError;
};

Process initial_process(const PetriNet& net, const Marking& m0);
Process extend(const Process& p, const CausalCut& cut, TransitionIndex t);
Process process_from_sequence(const PetriNet& net, const Marking& m0, std::span<const TransitionIndex> seq);
Marking final_marking(const Process& p);
bool is_run(const WorkflowNet& wf, const Process& p);

/// Lexicographically least linearization (by transition index). Two
/// processes of the same system are isomorphic iff these agree.
std::vector<TransitionIndex> canonical_sequence(const Process& p);
bool isomorphic(const Process& a, const Process& b);

/// Every linearization of the occurrence transitions respecting the causal
/// order, as label sequences. Throws once more than `limit` are found.
std::vector<std::vector<TransitionIndex>> linearizations(const Process& p, std::size_t limit = 100000);

struct RunEnumeration {
  std::vector<Process> runs;
  bool truncated = false;  // stopped at max_runs
};

/// All runs of an acyclic workflow net up to isomorphism, in
/// lexicographic order of their canonical sequences.
RunEnumeration enumerate_runs(const WorkflowNet& wf, std::size_t max_runs = 100000);

using StartTimes = std::vector<Duration>;

/// Earliest schedule: 0 on min(Pi), otherwise the longest path of
/// durations from a minimal place.
StartTimes min_schedule(const Process& p, std::span<const Duration> tau);
Duration t_min(const Process& p, std::span<const Duration> tau);

/// Edge-list rendering for debugging.
std::string to_dot(const Process& p);

}  // namespace wfthresh
