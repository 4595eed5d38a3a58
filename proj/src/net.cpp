#include "wfthresh/net.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <string_view>

#include "wfthresh/explore.hpp"

namespace wfthresh {

FiringError::FiringError(std::size_t index, std::string transition)
    : NetError("transition '" + transition + "' at position " + std::to_string(index) +
               " is not enabled"),
      index_(index),
      transition_(std::move(transition)) {}

void PetriNet::check_fresh(const std::string& name) const {
  if (name.empty()) throw NetError("empty node identifier");
  if (place_index_.contains(name) || transition_index_.contains(name))
    throw NetError("duplicate node identifier '" + name + "'");
}

PlaceIndex PetriNet::add_place(std::string name) {
  check_fresh(name);
  const PlaceIndex p = place_names_.size();
  place_index_.emplace(name, p);
  place_names_.push_back(std::move(name));
  p_pre_.emplace_back();
  p_post_.emplace_back();
  return p;
}

TransitionIndex PetriNet::add_transition(std::string name) {
  check_fresh(name);
  const TransitionIndex t = transition_names_.size();
  transition_index_.emplace(name, t);
  transition_names_.push_back(std::move(name));
  t_pre_.emplace_back();
  t_post_.emplace_back();
  return t;
}

TransitionIndex PetriNet::add_transition(std::string name, std::span<const PlaceIndex> pre,
                                         std::span<const PlaceIndex> post) {
  const TransitionIndex t = add_transition(std::move(name));
  for (PlaceIndex p : pre) add_input_arc(p, t);
  for (PlaceIndex p : post) add_output_arc(t, p);
  return t;
}

void PetriNet::add_input_arc(PlaceIndex p, TransitionIndex t) {
  if (p >= num_places() || t >= num_transitions()) throw NetError("arc endpoint out of range");
  auto& pre = t_pre_[t];
  if (std::find(pre.begin(), pre.end(), p) != pre.end())
    throw NetError("duplicate arc " + place_names_[p] + " -> " + transition_names_[t]);
  pre.push_back(p);
  p_post_[p].push_back(t);
}

void PetriNet::add_output_arc(TransitionIndex t, PlaceIndex p) {
  if (p >= num_places() || t >= num_transitions()) throw NetError("arc endpoint out of range");
  auto& post = t_post_[t];
  if (std::find(post.begin(), post.end(), p) != post.end())
    throw NetError("duplicate arc " + transition_names_[t] + " -> " + place_names_[p]);
  post.push_back(p);
  p_pre_[p].push_back(t);
}

std::optional<PlaceIndex> PetriNet::find_place(std::string_view name) const {
  auto it = place_index_.find(std::string(name));
  if (it == place_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TransitionIndex> PetriNet::find_transition(std::string_view name) const {
  auto it = transition_index_.find(std::string(name));
  if (it == transition_index_.end()) return std::nullopt;
  return it->second;
}

PlaceIndex PetriNet::place(std::string_view name) const {
  if (auto p = find_place(name)) return *p;
  throw NetError("unknown place '" + std::string(name) + "'");
}

TransitionIndex PetriNet::transition(std::string_view name) const {
  if (auto t = find_transition(name)) return *t;
  throw NetError("unknown transition '" + std::string(name) + "'");
}

std::vector<std::string> PetriNet::preset(std::string_view node) const {
  std::vector<std::string> out;
  if (auto p = find_place(node)) {
    for (TransitionIndex t : p_pre_[*p]) out.push_back(transition_names_[t]);
  } else if (auto t = find_transition(node)) {
    for (PlaceIndex q : t_pre_[*t]) out.push_back(place_names_[q]);
  } else {
    throw NetError("unknown node '" + std::string(node) + "'");
  }
  return out;
}

std::vector<std::string> PetriNet::postset(std::string_view node) const {
  std::vector<std::string> out;
  if (auto p = find_place(node)) {
    for (TransitionIndex t : p_post_[*p]) out.push_back(transition_names_[t]);
  } else if (auto t = find_transition(node)) {
    for (PlaceIndex q : t_post_[*t]) out.push_back(place_names_[q]);
  } else {
    throw NetError("unknown node '" + std::string(node) + "'");
  }
  return out;
}

std::size_t PetriNet::num_arcs() const {
  std::size_t n = 0;
  for (TransitionIndex t = 0; t < num_transitions(); ++t) n += t_pre_[t].size() + t_post_[t].size();
  return n;
}

Marking Marking::of(std::size_t places, std::span<const PlaceIndex> marked) {
  Marking m(places);
  for (PlaceIndex p : marked) m[p] += 1;
  return m;
}

std::uint64_t Marking::sum(std::span<const PlaceIndex> places) const {
  std::uint64_t s = 0;
  for (PlaceIndex p : places) s += tokens_.at(p);
  return s;
}

std::uint64_t Marking::total() const {
  return std::accumulate(tokens_.begin(), tokens_.end(), std::uint64_t{0});
}

Token Marking::max_tokens() const {
  return tokens_.empty() ? 0 : *std::max_element(tokens_.begin(), tokens_.end());
}

std::vector<PlaceIndex> Marking::support() const {
  std::vector<PlaceIndex> out;
  for (PlaceIndex p = 0; p < tokens_.size(); ++p)
    if (tokens_[p] > 0) out.push_back(p);
  return out;
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
  const auto& v = m.tokens();
  return std::hash<std::string_view>{}(
      std::string_view(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(Token)));
}

std::string to_string(const PetriNet& net, const Marking& m) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (PlaceIndex p = 0; p < m.size(); ++p) {
    if (m[p] == 0) continue;
    if (!first) os << ", ";
    first = false;
    os << net.place_name(p);
    if (m[p] > 1) os << ':' << m[p];
  }
  os << '}';
  return os.str();
}

Marking marking_of(const PetriNet& net, std::span<const std::string> places) {
  Marking m(net.num_places());
  for (const auto& name : places) m[net.place(name)] += 1;
  return m;
}

Marking marking_of(const PetriNet& net, std::initializer_list<std::string_view> places) {
  Marking m(net.num_places());
  for (auto name : places) m[net.place(name)] += 1;
  return m;
}

std::vector<TransitionIndex> transitions_of(const PetriNet& net,
                                            std::initializer_list<std::string_view> names) {
  std::vector<TransitionIndex> out;
  for (auto n : names) out.push_back(net.transition(n));
  return out;
}

std::vector<TransitionIndex> transitions_of(const PetriNet& net, std::span<const std::string> names) {
  std::vector<TransitionIndex> out;
  for (const auto& n : names) out.push_back(net.transition(n));
  return out;
}

bool enabled(const PetriNet& net, const Marking& m, TransitionIndex t) {
  if (t >= net.num_transitions()) throw NetError("unknown transition index");
  if (m.size() != net.num_places()) throw NetError("marking size does not match net");
  for (PlaceIndex p : net.pre(t))
    if (m[p] == 0) return false;
  return true;
}

Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t) {
  if (!enabled(net, m, t)) throw FiringError(0, net.transition_name(t));
  Marking next = m;
  for (PlaceIndex p : net.pre(t)) next[p] -= 1;
  for (PlaceIndex p : net.post(t)) next[p] += 1;
  return next;
}

Marking fire_sequence(const PetriNet& net, const Marking& m, std::span<const TransitionIndex> seq) {
  Marking cur = m;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!enabled(net, cur, seq[i])) throw FiringError(i, net.transition_name(seq[i]));
    for (PlaceIndex p : net.pre(seq[i])) cur[p] -= 1;
    for (PlaceIndex p : net.post(seq[i])) cur[p] += 1;
  }
  return cur;
}

IncidenceMatrix incidence(const PetriNet& net) {
  IncidenceMatrix n(net.num_places(), net.num_transitions());
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
    for (PlaceIndex p : net.post(t)) n.set(p, t, n.at(p, t) + 1);
    for (PlaceIndex p : net.pre(t)) n.set(p, t, n.at(p, t) - 1);
  }
  return n;
}

bool is_marked_graph(const PetriNet& net) {
  for (PlaceIndex p = 0; p < net.num_places(); ++p)
    if (net.producers(p).size() > 1 || net.consumers(p).size() > 1) return false;
  return true;
}

bool is_free_choice(const PetriNet& net) {
  // Two places with overlapping postsets must have equal postsets; it
  // suffices to compare each place with the presets of its consumers.
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    auto mine = net.consumers(p);
    std::sort(mine.begin(), mine.end());
    for (TransitionIndex t : net.consumers(p)) {
      for (PlaceIndex q : net.pre(t)) {
        if (q == p) continue;
        auto theirs = net.consumers(q);
        std::sort(theirs.begin(), theirs.end());
        if (theirs != mine) return false;
      }
    }
  }
  return true;
}

bool is_acyclic(const PetriNet& net) {
  // Kahn's algorithm over the bipartite flow graph; nodes are places then transitions.
  const std::size_t np = net.num_places();
  const std::size_t n = np + net.num_transitions();
  std::vector<std::size_t> indegree(n, 0);
  for (PlaceIndex p = 0; p < np; ++p) indegree[p] = net.producers(p).size();
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t) indegree[np + t] = net.pre(t).size();
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    ++seen;
    if (v < np) {
      for (TransitionIndex t : net.consumers(v))
        if (--indegree[np + t] == 0) ready.push_back(np + t);
    } else {
      for (PlaceIndex p : net.post(v - np))
        if (--indegree[p] == 0) ready.push_back(p);
    }
  }
  return seen == n;
}

ReachableSet reachable_markings(const PetriNet& net, const Marking& m0, std::size_t limit) {
  if (limit == 0) throw NetError("state limit must be positive");
  const auto graph = explore(net, m0, {.limit = limit});
  ReachableSet out;
  out.exhausted = graph.exhausted();
  out.markings.reserve(graph.size());
  for (StateId s = 0; s < graph.size(); ++s) out.markings.push_back(graph.marking(s));
  return out;
}

}  // namespace wfthresh
