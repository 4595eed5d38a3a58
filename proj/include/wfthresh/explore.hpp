#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wfthresh/net.hpp"

namespace wfthresh {

using StateId = std::uint32_t;
inline constexpr StateId kNoState = ~StateId{0};

/// Interned set of markings packed into one arena. Token counts are
/// stored as 16-bit values; callers must check `fits()` before insert.
class StateStore {
 public:
  using Cell = std::uint16_t;
  static constexpr Token kMaxCell = 0xFFFF;

  explicit StateStore(std::size_t width);

  std::size_t width() const { return width_; }
  std::size_t size() const { return count_; }

  /// Returns the id and whether the state was newly added.
  std::pair<StateId, bool> insert(std::span<const Cell> state);
  std::optional<StateId> find(std::span<const Cell> state) const;
  std::span<const Cell> get(StateId id) const {
    return {arena_.data() + static_cast<std::size_t>(id) * width_, width_};
  }

  Marking marking(StateId id) const;
  static std::vector<Cell> pack(const Marking& m);

 private:
  std::size_t hash(std::span<const Cell> state) const;
  void grow();

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<Cell> arena_;
  std::vector<std::size_t> hashes_;
  std::vector<StateId> slots_;  // kNoState = empty
};

/// Fires t on a packed state. Returns false on 16-bit overflow.
bool fire_packed(const PetriNet& net, std::span<const StateStore::Cell> from, TransitionIndex t,
                 std::vector<StateStore::Cell>& out);
bool enabled_packed(const PetriNet& net, std::span<const StateStore::Cell> state, TransitionIndex t);

struct ExploreOptions {
  std::size_t limit = kDefaultStateLimit;
  bool record_edges = false;
};

struct Edge {
  TransitionIndex transition;
  StateId target;
};

/// Explicit reachability graph built breadth-first from one marking.
class ReachabilityGraph {
 public:
  std::size_t size() const { return store_.size(); }
  bool complete() const { return !exhausted_; }
  bool exhausted() const { return exhausted_; }
  /// A token count exceeded the packed range; exploration stopped.
  bool overflowed() const { return overflow_; }

  Marking marking(StateId id) const { return store_.marking(id); }
  std::span<const StateStore::Cell> state(StateId id) const { return store_.get(id); }
  std::optional<StateId> find(const Marking& m) const;

  /// Shortest firing sequence from the initial marking (BFS tree).
  std::vector<TransitionIndex> path_to(StateId id) const;

  bool has_edges() const { return !edge_offsets_.empty(); }
  /// Outgoing edges; only for fully expanded states when edges were recorded.
  std::span<const Edge> successors(StateId id) const;
  /// Number of states whose successors have been computed.
  std::size_t expanded() const { return expanded_; }

 private:
  friend ReachabilityGraph explore(const PetriNet&, const Marking&, const ExploreOptions&);
  explicit ReachabilityGraph(std::size_t width) : store_(width) {}

  StateStore store_;
  std::vector<StateId> parent_;
  std::vector<TransitionIndex> parent_transition_;
  std::vector<std::size_t> edge_offsets_;
  std::vector<Edge> edges_;
  std::size_t expanded_ = 0;
  bool exhausted_ = false;
  bool overflow_ = false;
};

ReachabilityGraph explore(const PetriNet& net, const Marking& m0, const ExploreOptions& options = {});

}  // namespace wfthresh
