#include "wfthresh/explore.hpp"

#include <algorithm>
#include <functional>
#include <string_view>

namespace wfthresh {

StateStore::StateStore(std::size_t width) : width_(width), slots_(1024, kNoState) {}

std::size_t StateStore::hash(std::span<const Cell> state) const {
  return std::hash<std::string_view>{}(
      std::string_view(reinterpret_cast<const char*>(state.data()), state.size() * sizeof(Cell)));
}

std::optional<StateId> StateStore::find(std::span<const Cell> state) const {
  const std::size_t h = hash(state);
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = h & mask;; i = (i + 1) & mask) {
    const StateId id = slots_[i];
    if (id == kNoState) return std::nullopt;
    if (hashes_[id] == h && std::equal(state.begin(), state.end(), get(id).begin())) return id;
  }
}

std::pair<StateId, bool> StateStore::insert(std::span<const Cell> state) {
  if ((count_ + 1) * 2 > slots_.size()) grow();
  const std::size_t h = hash(state);
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = h & mask;
  for (;; i = (i + 1) & mask) {
    const StateId id = slots_[i];
    if (id == kNoState) break;
    if (hashes_[id] == h && std::equal(state.begin(), state.end(), get(id).begin())) return {id, false};
  }
  const auto id = static_cast<StateId>(count_++);
  slots_[i] = id;
  hashes_.push_back(h);
  arena_.insert(arena_.end(), state.begin(), state.end());
  return {id, true};
}

void StateStore::grow() {
  std::vector<StateId> fresh(slots_.size() * 2, kNoState);
  const std::size_t mask = fresh.size() - 1;
  for (StateId id = 0; id < count_; ++id) {
    std::size_t i = hashes_[id] & mask;
    while (fresh[i] != kNoState) i = (i + 1) & mask;
    fresh[i] = id;
  }
  slots_ = std::move(fresh);
}

Marking StateStore::marking(StateId id) const {
  const auto cells = get(id);
  return Marking(std::vector<Token>(cells.begin(), cells.end()));
}

std::vector<StateStore::Cell> StateStore::pack(const Marking& m) {
  std::vector<Cell> out(m.size());
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p] > kMaxCell) throw NetError("token count exceeds exploration range");
    out[p] = static_cast<Cell>(m[p]);
  }
  return out;
}

bool enabled_packed(const PetriNet& net, std::span<const StateStore::Cell> state, TransitionIndex t) {
  for (PlaceIndex p : net.pre(t))
    if (state[p] == 0) return false;
  return true;
}

bool fire_packed(const PetriNet& net, std::span<const StateStore::Cell> from, TransitionIndex t,
                 std::vector<StateStore::Cell>& out) {
  out.assign(from.begin(), from.end());
  for (PlaceIndex p : net.pre(t)) out[p] -= 1;
  for (PlaceIndex p : net.post(t)) {
    if (out[p] == StateStore::kMaxCell) return false;
    out[p] += 1;
  }
  return true;
}

std::optional<StateId> ReachabilityGraph::find(const Marking& m) const {
  if (m.size() != store_.width() || m.max_tokens() > StateStore::kMaxCell) return std::nullopt;
  return store_.find(StateStore::pack(m));
}

std::vector<TransitionIndex> ReachabilityGraph::path_to(StateId id) const {
  std::vector<TransitionIndex> path;
  while (parent_[id] != kNoState) {
    path.push_back(parent_transition_[id]);
    id = parent_[id];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::span<const Edge> ReachabilityGraph::successors(StateId id) const {
  if (id + 1 >= edge_offsets_.size()) return {};
  return {edges_.data() + edge_offsets_[id], edge_offsets_[id + 1] - edge_offsets_[id]};
}

ReachabilityGraph explore(const PetriNet& net, const Marking& m0, const ExploreOptions& options) {
  if (m0.size() != net.num_places()) throw NetError("marking size does not match net");
  ReachabilityGraph g(net.num_places());
  g.store_.insert(StateStore::pack(m0));
  g.parent_.push_back(kNoState);
  g.parent_transition_.push_back(0);
  if (options.record_edges) g.edge_offsets_.push_back(0);

  std::vector<StateStore::Cell> current, next;
  bool stop = false;
  // States are numbered in discovery order, so the id doubles as the BFS queue.
  for (StateId s = 0; s < g.store_.size() && !stop; ++s) {
    const auto view = g.store_.get(s);
    current.assign(view.begin(), view.end());
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      if (!enabled_packed(net, current, t)) continue;
      if (!fire_packed(net, current, t, next)) {
        g.overflow_ = true;
        g.exhausted_ = true;
        stop = true;
        break;
      }
      StateId target;
      if (auto found = g.store_.find(next)) {
        target = *found;
      } else {
        if (g.store_.size() >= options.limit) {
          g.exhausted_ = true;
          stop = true;
          break;
        }
        target = g.store_.insert(next).first;
        g.parent_.push_back(s);
        g.parent_transition_.push_back(t);
      }
      if (options.record_edges) g.edges_.push_back({t, target});
    }
    if (!stop) {
      ++g.expanded_;
      if (options.record_edges) g.edge_offsets_.push_back(g.edges_.size());
    }
  }
  return g;
}

}  // namespace wfthresh
