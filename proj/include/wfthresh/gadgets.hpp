#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfthresh/scheduling.hpp"
#include "wfthresh/workflow.hpp"

namespace wfthresh {

/// Simple undirected graph. Edges keep the orientation they were given in;
/// the first endpoint plays the role of v, the second of u.
struct Graph {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::size_t add_vertex(std::string name);
  /// Throws std::invalid_argument on self-loops, duplicates or bad indices.
  void add_edge(std::size_t a, std::size_t b);
  std::vector<std::size_t> degrees() const;
};

/// One edge "u v" per line; '#' starts a comment. Vertices are numbered by
/// first appearance.
Graph parse_graph(std::string_view text);

struct JobInstance {
  std::vector<std::string> ids;
  std::vector<Job> jobs;
  Time deadline = 0;
  std::size_t machines = 0;
};

/// Lines "id duration dep,dep,..." with deps naming predecessor jobs.
JobInstance parse_jobs(std::string_view text);

/// Workflow net N_G of the independence-number reduction. Places of weight
/// two are emitted as two unit places with suffixes "a" and "b". Throws
/// std::invalid_argument for graphs with isolated vertices or no edges.
WorkflowNet mis_to_workflow(const Graph& g);

/// Independence number by subset enumeration; at most 24 vertices.
std::size_t mis_bruteforce(const Graph& g);

struct SchedulingReduction {
  WorkflowNet net;
  std::size_t k_prime = 0;
  bool degenerate = false;  // t_min exceeded the deadline; k' = 0
};

/// Acyclic workflow marked graph N with RT(N) <= k' iff the jobs fit in
/// time t on k machines.
SchedulingReduction scheduling_to_marked_graph(const JobInstance& j);

enum class FixtureName { fig1a, fig1b, fig4, fig5, fig6, fig8 };

const char* to_string(FixtureName f);
FixtureName fixture_from_string(std::string_view name);
std::vector<FixtureName> all_fixtures();

WorkflowNet fixture(FixtureName name);
WorkflowNet fixture(std::string_view name);

/// Five vertices v1..v5 with edges v1v2, v1v3, v2v3, v2v4, v2v5.
Graph fig7_graph();

}  // namespace wfthresh
