#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wfthresh {

using PlaceIndex = std::size_t;
using TransitionIndex = std::size_t;
using Token = std::uint32_t;

/// Default state budget for explicit exploration.
inline constexpr std::size_t kDefaultStateLimit = 10'000'000;

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a firing sequence hits a disabled transition.
class FiringError : public NetError {
 public:
  FiringError(std::size_t index, std::string transition);
  std::size_t index() const { return index_; }
  const std::string& transition() const { return transition_; }

 private:
  std::size_t index_;
  std::string transition_;
};

/// Ordinary place/transition net. Nodes are indexed in insertion order,
/// which fixes row/column order of the incidence matrix.
class PetriNet {
 public:
  PlaceIndex add_place(std::string name);
  TransitionIndex add_transition(std::string name);
  /// Arc place -> transition.
  void add_input_arc(PlaceIndex p, TransitionIndex t);
  /// Arc transition -> place.
  void add_output_arc(TransitionIndex t, PlaceIndex p);
  /// Adds a transition with the given preset and postset in one go.
  TransitionIndex add_transition(std::string name, std::span<const PlaceIndex> pre,
                                 std::span<const PlaceIndex> post);

  std::size_t num_places() const { return place_names_.size(); }
  std::size_t num_transitions() const { return transition_names_.size(); }

  const std::string& place_name(PlaceIndex p) const { return place_names_.at(p); }
  const std::string& transition_name(TransitionIndex t) const { return transition_names_.at(t); }

  std::optional<PlaceIndex> find_place(std::string_view name) const;
  std::optional<TransitionIndex> find_transition(std::string_view name) const;
  PlaceIndex place(std::string_view name) const;
  TransitionIndex transition(std::string_view name) const;

  const std::vector<PlaceIndex>& pre(TransitionIndex t) const { return t_pre_.at(t); }
  const std::vector<PlaceIndex>& post(TransitionIndex t) const { return t_post_.at(t); }
  /// Transitions producing into p.
  const std::vector<TransitionIndex>& producers(PlaceIndex p) const { return p_pre_.at(p); }
  /// Transitions consuming from p.
  const std::vector<TransitionIndex>& consumers(PlaceIndex p) const { return p_post_.at(p); }

  /// Preset of any node, by name, in insertion order.
  std::vector<std::string> preset(std::string_view node) const;
  std::vector<std::string> postset(std::string_view node) const;

  std::size_t num_arcs() const;

  bool operator==(const PetriNet&) const = default;

 private:
  void check_fresh(const std::string& name) const;

  std::vector<std::string> place_names_;
  std::vector<std::string> transition_names_;
  std::unordered_map<std::string, PlaceIndex> place_index_;
  std::unordered_map<std::string, TransitionIndex> transition_index_;
  std::vector<std::vector<PlaceIndex>> t_pre_, t_post_;
  std::vector<std::vector<TransitionIndex>> p_pre_, p_post_;
};

/// Token count per place.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : tokens_(places, 0) {}
  explicit Marking(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  /// Marking with one token on each listed place.
  static Marking of(std::size_t places, std::span<const PlaceIndex> marked);

  std::size_t size() const { return tokens_.size(); }
  Token operator[](PlaceIndex p) const { return tokens_[p]; }
  Token& operator[](PlaceIndex p) { return tokens_[p]; }
  const std::vector<Token>& tokens() const { return tokens_; }

  /// M(S).
  std::uint64_t sum(std::span<const PlaceIndex> places) const;
  std::uint64_t total() const;
  Token max_tokens() const;
  /// Places carrying at least one token, ascending.
  std::vector<PlaceIndex> support() const;

  bool operator==(const Marking&) const = default;
  auto operator<=>(const Marking&) const = default;

 private:
  std::vector<Token> tokens_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept;
};

/// "{p1, p2}" style rendering; tokens > 1 rendered as "p:2".
std::string to_string(const PetriNet& net, const Marking& m);
/// Marking from a list of place names (repeats add tokens).
Marking marking_of(const PetriNet& net, std::span<const std::string> places);
Marking marking_of(const PetriNet& net, std::initializer_list<std::string_view> places);

std::vector<TransitionIndex> transitions_of(const PetriNet& net,
                                            std::initializer_list<std::string_view> names);
std::vector<TransitionIndex> transitions_of(const PetriNet& net,
                                            std::span<const std::string> names);

bool enabled(const PetriNet& net, const Marking& m, TransitionIndex t);
/// Throws FiringError if t is disabled.
Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t);
Marking fire_sequence(const PetriNet& net, const Marking& m,
                      std::span<const TransitionIndex> seq);

class IncidenceMatrix {
 public:
  IncidenceMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int at(PlaceIndex p, TransitionIndex t) const { return data_[p * cols_ + t]; }
  void set(PlaceIndex p, TransitionIndex t, int v) { data_[p * cols_ + t] = static_cast<std::int8_t>(v); }
  bool operator==(const IncidenceMatrix&) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<std::int8_t> data_;
};

IncidenceMatrix incidence(const PetriNet& net);

bool is_marked_graph(const PetriNet& net);
bool is_free_choice(const PetriNet& net);
bool is_acyclic(const PetriNet& net);

struct ReachableSet {
  std::vector<Marking> markings;  // discovery (BFS) order
  bool exhausted = false;
};

/// Breadth-first reachability, transitions tried in declaration order.
ReachableSet reachable_markings(const PetriNet& net, const Marking& m0,
                                std::size_t limit = kDefaultStateLimit);

}  // namespace wfthresh
