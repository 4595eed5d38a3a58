#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfthresh/net.hpp"

namespace wfthresh {

using Duration = std::uint32_t;

/// How the duration-bearing place set D is chosen.
enum class DPolicy {
  positive,        // D = { p | tau(p) > 0 }
  all_but_output,  // D = P \ O
  explicit_set,    // D given verbatim
};

const char* to_string(DPolicy policy);

/// A Petri net with input places I, output places O, task durations tau and
/// the duration set D used for concurrency.
class WorkflowNet {
 public:
  WorkflowNet() = default;
  WorkflowNet(PetriNet net, std::vector<PlaceIndex> inputs, std::vector<PlaceIndex> outputs,
              std::vector<Duration> durations = {});

  const PetriNet& net() const { return net_; }
  const std::vector<PlaceIndex>& inputs() const { return inputs_; }
  const std::vector<PlaceIndex>& outputs() const { return outputs_; }
  const std::vector<Duration>& durations() const { return durations_; }
  Duration duration(PlaceIndex p) const { return durations_.at(p); }

  DPolicy d_policy() const { return policy_; }
  const std::vector<PlaceIndex>& explicit_d() const { return explicit_d_; }
  void set_d_policy(DPolicy policy, std::vector<PlaceIndex> explicit_d = {});

  /// Membership vector of D, indexed by place.
  std::vector<bool> d_mask() const;
  /// D as a sorted place list.
  std::vector<PlaceIndex> d_places() const;

  Marking initial_marking() const { return Marking::of(net_.num_places(), inputs_); }
  Marking final_marking() const { return Marking::of(net_.num_places(), outputs_); }

  bool operator==(const WorkflowNet&) const = default;

 private:
  PetriNet net_;
  std::vector<PlaceIndex> inputs_;
  std::vector<PlaceIndex> outputs_;
  std::vector<Duration> durations_;
  DPolicy policy_ = DPolicy::positive;
  std::vector<PlaceIndex> explicit_d_;
};

enum class ViolationKind {
  empty_inputs,
  empty_outputs,
  input_has_producer,   // condition (a): preset of I nonempty
  output_has_consumer,  // condition (a): postset of O nonempty
  off_path,             // condition (b): node not on an I-to-O path
};

struct StructuralViolation {
  ViolationKind kind;
  std::string node;  // empty for empty_inputs / empty_outputs
  std::string message;
};

std::vector<StructuralViolation> validate_workflow(const WorkflowNet& wf);

/// Single input/output form: fresh i -> t_i -> I and O -> t_o -> o.
/// Returns the input unchanged if |I| = |O| = 1.
WorkflowNet normalize_single_entry_exit(const WorkflowNet& wf);

/// Copy of the net plus a transition with preset O and postset I. The new
/// transition is the last one.
PetriNet short_circuit(const WorkflowNet& wf);

enum class SoundnessCondition {
  option_to_complete,
  proper_completion,
  no_dead_transition,
  state_limit,
};

const char* to_string(SoundnessCondition c);

enum class Verdict { sound, unsound, unknown };

struct SoundnessReport {
  Verdict verdict = Verdict::unknown;
  bool one_safe = false;  // meaningful only when exploration completed
  std::optional<SoundnessCondition> violated_condition;
  std::optional<std::vector<TransitionIndex>> witness;
  std::vector<TransitionIndex> dead_transitions;
  std::size_t states_explored = 0;

  bool sound() const { return verdict == Verdict::sound; }
};

/// Behavioural soundness by full exploration of reach(M_I).
/// Violations are looked for in the order proper completion, option to
/// complete, dead transitions.
SoundnessReport check_soundness(const WorkflowNet& wf, std::size_t limit = kDefaultStateLimit);

}  // namespace wfthresh
