#include "wfthresh/gadgets.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include "wfthresh/process.hpp"

namespace wfthresh {

std::size_t Graph::add_vertex(std::string name) {
  if (std::find(vertices.begin(), vertices.end(), name) != vertices.end())
    throw std::invalid_argument("duplicate vertex '" + name + "'");
  vertices.push_back(std::move(name));
  return vertices.size() - 1;
}

void Graph::add_edge(std::size_t a, std::size_t b) {
  if (a >= vertices.size() || b >= vertices.size()) throw std::invalid_argument("edge references unknown vertex");
  if (a == b) throw std::invalid_argument("self-loop on '" + vertices[a] + "'");
  for (const auto& [x, y] : edges)
    if ((x == a && y == b) || (x == b && y == a))
      throw std::invalid_argument("duplicate edge {" + vertices[a] + ", " + vertices[b] + "}");
  edges.emplace_back(a, b);
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(vertices.size(), 0);
  for (const auto& [a, b] : edges) {
    ++d[a];
    ++d[b];
  }
  return d;
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::istringstream is{std::string(line)};
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::string_view strip_comment(std::string_view line) {
  if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
  return line;
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t number = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++number;
    f(number, strip_comment(line));
  }
}

std::invalid_argument line_error(std::size_t line, const std::string& what) {
  return std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

}  // namespace

Graph parse_graph(std::string_view text) {
  Graph g;
  std::map<std::string, std::size_t> index;
  auto vertex = [&](const std::string& name) {
    if (auto it = index.find(name); it != index.end()) return it->second;
    const std::size_t v = g.add_vertex(name);
    index.emplace(name, v);
    return v;
  };
  for_each_line(text, [&](std::size_t n, std::string_view line) {
    const auto words = split_ws(line);
    if (words.empty()) return;
    if (words.size() != 2) throw line_error(n, "expected 'u v'");
    try {
      const std::size_t a = vertex(words[0]);
      const std::size_t b = vertex(words[1]);
      g.add_edge(a, b);
    } catch (const std::invalid_argument& e) {
      throw line_error(n, e.what());
    }
  });
  return g;
}

JobInstance parse_jobs(std::string_view text) {
  struct Line {
    std::size_t number;
    std::string id;
    Duration duration;
    std::vector<std::string> deps;
  };
  std::vector<Line> lines;
  for_each_line(text, [&](std::size_t n, std::string_view line) {
    const auto words = split_ws(line);
    if (words.empty()) return;
    if (words.size() > 3) throw line_error(n, "expected 'id duration dep,dep,...'");
    if (words.size() < 2) throw line_error(n, "missing duration");
    Line l{n, words[0], 0, {}};
    const auto& d = words[1];
    auto [ptr, ec] = std::from_chars(d.data(), d.data() + d.size(), l.duration);
    if (ec != std::errc{} || ptr != d.data() + d.size()) throw line_error(n, "bad duration '" + d + "'");
    if (words.size() == 3) {
      std::string dep;
      std::istringstream is(words[2]);
      while (std::getline(is, dep, ','))
        if (!dep.empty()) l.deps.push_back(dep);
    }
    lines.push_back(std::move(l));
  });
  JobInstance j;
  std::map<std::string, std::size_t> index;
  for (const auto& l : lines) {
    if (!index.emplace(l.id, j.ids.size()).second) throw line_error(l.number, "duplicate job '" + l.id + "'");
    j.ids.push_back(l.id);
    j.jobs.push_back({l.duration, {}});
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (const auto& dep : lines[i].deps) {
      auto it = index.find(dep);
      if (it == index.end()) throw line_error(lines[i].number, "unknown job '" + dep + "'");
      j.jobs[i].predecessors.push_back(it->second);
    }
  }
  return j;
}

WorkflowNet mis_to_workflow(const Graph& g) {
  if (g.edges.empty()) throw std::invalid_argument("graph has no edges");
  const auto deg = g.degrees();
  for (std::size_t v = 0; v < deg.size(); ++v)
    if (deg[v] == 0) throw std::invalid_argument("isolated vertex '" + g.vertices[v] + "'");

  PetriNet net;
  std::vector<Duration> tau;
  auto place = [&](std::string name, Duration d) {
    tau.push_back(d);
    return net.add_place(std::move(name));
  };
  std::vector<PlaceIndex> inputs, outputs;
  std::vector<std::vector<PlaceIndex>> vertex_inputs(g.vertices.size());

  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto [a, b] = g.edges[k];
    const std::string e = "e" + std::to_string(k + 1);
    const std::string& va = g.vertices[a];
    const std::string& vb = g.vertices[b];
    const PlaceIndex e0 = place(e + "_0", 0);
    inputs.push_back(e0);
    const PlaceIndex a2a = place(e + "_" + va + "_2a", 1), a2b = place(e + "_" + va + "_2b", 1);
    const PlaceIndex b2a = place(e + "_" + vb + "_2a", 1), b2b = place(e + "_" + vb + "_2b", 1);
    const PlaceIndex a4 = place(e + "_" + va + "_4", 0);
    const PlaceIndex b4 = place(e + "_" + vb + "_4", 0);
    const PlaceIndex pre0[] = {e0};
    const PlaceIndex a1_post[] = {a2a, a2b, b4};
    const PlaceIndex b1_post[] = {b2a, b2b, a4};
    net.add_transition(e + "_" + va + "_1", pre0, a1_post);
    net.add_transition(e + "_" + vb + "_1", pre0, b1_post);
    const PlaceIndex a3_pre[] = {a2a, a2b}, a3_post[] = {a4};
    const PlaceIndex b3_pre[] = {b2a, b2b}, b3_post[] = {b4};
    net.add_transition(e + "_" + va + "_3", a3_pre, a3_post);
    net.add_transition(e + "_" + vb + "_3", b3_pre, b3_post);
    vertex_inputs[a].push_back(a4);
    vertex_inputs[b].push_back(b4);
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const PlaceIndex v2 = place(g.vertices[v] + "_2", 1);
    outputs.push_back(v2);
    const PlaceIndex post[] = {v2};
    net.add_transition(g.vertices[v] + "_1", vertex_inputs[v], post);
  }
  return WorkflowNet(std::move(net), std::move(inputs), std::move(outputs), std::move(tau));
}

std::size_t mis_bruteforce(const Graph& g) {
  const std::size_t n = g.vertices.size();
  if (n > 24) throw std::invalid_argument("mis_bruteforce supports at most 24 vertices");
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& [a, b] : g.edges) {
    adj[a] |= 1u << b;
    adj[b] |= 1u << a;
  }
  std::size_t best = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(s));
    if (size <= best) continue;
    bool independent = true;
    for (std::size_t v = 0; v < n && independent; ++v)
      if ((s >> v & 1u) && (adj[v] & s)) independent = false;
    if (independent) best = size;
  }
  return best;
}

SchedulingReduction scheduling_to_marked_graph(const JobInstance& j) {
  const std::size_t n = j.jobs.size();
  if (j.deadline == 0) throw std::invalid_argument("deadline must be positive");
  // Transitive closure of the precedence relation.
  std::vector<std::vector<bool>> before(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p : j.jobs[i].predecessors) {
      if (p >= n) throw std::invalid_argument("job predecessor out of range");
      before[p][i] = true;
    }
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t a = 0; a < n; ++a)
      if (before[a][m])
        for (std::size_t b = 0; b < n; ++b)
          if (before[m][b]) before[a][b] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (before[i][i]) throw std::invalid_argument("cyclic job precedence");

  std::vector<bool> minimal(n, true), maximal(n, true);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (before[a][b]) {
        maximal[a] = false;
        minimal[b] = false;
      }

  auto id = [&](std::size_t i) { return "J" + (i < j.ids.size() ? j.ids[i] : std::to_string(i + 1)); };
  PetriNet net;
  std::vector<Duration> tau;
  auto place = [&](std::string name, Duration d) {
    tau.push_back(d);
    return net.add_place(std::move(name));
  };
  const PlaceIndex p_in = place("p_I", 0);
  const PlaceIndex p_out = place("p_O", 0);
  const TransitionIndex t_in = net.add_transition("t_I");
  const TransitionIndex t_out = net.add_transition("t_O");
  net.add_input_arc(p_in, t_in);
  net.add_output_arc(t_out, p_out);

  std::vector<std::optional<TransitionIndex>> start(n), done(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PlaceIndex p = place("p_" + id(i), j.jobs[i].duration);
    if (minimal[i]) {
      net.add_output_arc(t_in, p);
    } else {
      start[i] = net.add_transition("t_" + id(i));
      net.add_output_arc(*start[i], p);
    }
    if (maximal[i]) {
      net.add_input_arc(p, t_out);
    } else {
      done[i] = net.add_transition("t_" + id(i) + "_done");
      net.add_input_arc(p, *done[i]);
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (before[a][b]) {
        const PlaceIndex p = place("p_" + id(a) + "_" + id(b), 0);
        net.add_output_arc(*done[a], p);
        net.add_input_arc(p, *start[b]);
      }

  SchedulingReduction out;
  {
    const WorkflowNet partial(net, {p_in}, {p_out}, tau);
    // A marked graph has a single maximal firing sequence up to reordering.
    Marking m = partial.initial_marking();
    std::vector<TransitionIndex> seq;
    for (bool progress = true; progress;) {
      progress = false;
      for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
        if (!enabled(net, m, t)) continue;
        m = fire(net, m, t);
        seq.push_back(t);
        progress = true;
      }
    }
    const Process run = process_from_sequence(partial.net(), partial.initial_marking(), seq);
    if (t_min(run, partial.durations()) > j.deadline) {
      out.net = partial;
      out.degenerate = true;
      out.k_prime = 0;
      return out;
    }
  }
  const PlaceIndex p_t = place("p_deadline", j.deadline);
  net.add_output_arc(t_in, p_t);
  net.add_input_arc(p_t, t_out);
  out.net = WorkflowNet(std::move(net), {p_in}, {p_out}, std::move(tau));
  out.k_prime = j.machines + 1;
  return out;
}

const char* to_string(FixtureName f) {
  switch (f) {
    case FixtureName::fig1a: return "fig1a";
    case FixtureName::fig1b: return "fig1b";
    case FixtureName::fig4: return "fig4";
    case FixtureName::fig5: return "fig5";
    case FixtureName::fig6: return "fig6";
    case FixtureName::fig8: return "fig8";
  }
  return "?";
}

std::vector<FixtureName> all_fixtures() {
  return {FixtureName::fig1a, FixtureName::fig1b, FixtureName::fig4,
          FixtureName::fig5,  FixtureName::fig6,  FixtureName::fig8};
}

FixtureName fixture_from_string(std::string_view name) {
  for (FixtureName f : all_fixtures())
    if (name == to_string(f)) return f;
  throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
}

namespace {

struct Builder {
  PetriNet net;
  std::vector<Duration> tau;

  void places(std::initializer_list<std::pair<const char*, Duration>> ps) {
    for (const auto& [name, d] : ps) {
      net.add_place(name);
      tau.push_back(d);
    }
  }
  void trans(const char* name, std::initializer_list<const char*> pre, std::initializer_list<const char*> post) {
    const TransitionIndex t = net.add_transition(name);
    for (const char* p : pre) net.add_input_arc(net.place(p), t);
    for (const char* p : post) net.add_output_arc(t, net.place(p));
  }
  WorkflowNet build(std::initializer_list<const char*> in, std::initializer_list<const char*> out) {
    std::vector<PlaceIndex> i, o;
    for (const char* p : in) i.push_back(net.place(p));
    for (const char* p : out) o.push_back(net.place(p));
    return WorkflowNet(std::move(net), std::move(i), std::move(o), std::move(tau));
  }
};

WorkflowNet fig1(bool with_loop) {
  Builder b;
  b.places({{"i", 0}, {"p1", 1}, {"p2", 1}, {"p3", 1}, {"p4", 2}});
  if (with_loop) b.places({{"p5", 2}});
  b.places({{"p6", 1}, {"p7", 1}, {"p8", 2}, {"p9", 2}, {"o", 0}});
  b.trans("t1", {"i"}, {"p1", "p2", "p7"});
  b.trans("t2", {"p1"}, {"p3"});
  b.trans("t3", {"p2"}, {"p4"});
  if (with_loop) {
    b.trans("t4", {"p3", "p4"}, {"p5", "p2"});
    b.trans("t5", {"p5"}, {"p1"});
  }
  b.trans("t6", {"p3", "p4"}, {"p6", "p8"});
  b.trans("t7", {"p6", "p7"}, {"p9"});
  b.trans("t8", {"p8", "p9"}, {"o"});
  return b.build({"i"}, {"o"});
}

WorkflowNet fig4() {
  Builder b;
  b.places({{"i", 0},
            {"p1", 1},
            {"p2", 1},
            {"p3", 2},
            {"p4", 5},
            {"p5", 3},
            {"p6", 2},
            {"p7", 2},
            {"p8", 2},
            {"p9", 0},
            {"o", 0}});
  b.trans("t1", {"i"}, {"p1", "p2", "p3", "p4"});
  b.trans("t2", {"p1", "p2"}, {"p8"});
  b.trans("t3", {"p3"}, {"p5"});
  b.trans("t4", {"p3"}, {"p6", "p7"});
  b.trans("t5", {"p5"}, {"p9"});
  b.trans("t6", {"p6", "p7"}, {"p9"});
  b.trans("t7", {"p4", "p8", "p9"}, {"o"});
  return b.build({"i"}, {"o"});
}

WorkflowNet fig5() {
  Builder b;
  b.places({{"e0", 0},
            {"ev2a", 1},
            {"ev2b", 1},
            {"eu2a", 1},
            {"eu2b", 1},
            {"ev4", 0},
            {"eu4", 0},
            {"oa", 1},
            {"ob", 1}});
  b.trans("ev1", {"e0"}, {"ev2a", "ev2b", "eu4"});
  b.trans("eu1", {"e0"}, {"eu2a", "eu2b", "ev4"});
  b.trans("ev3", {"ev2a", "ev2b"}, {"ev4"});
  b.trans("eu3", {"eu2a", "eu2b"}, {"eu4"});
  b.trans("join", {"ev4", "eu4"}, {"oa", "ob"});
  return b.build({"e0"}, {"oa", "ob"});
}

WorkflowNet fig6() {
  Builder b;
  b.places({{"i", 0}, {"e0", 0}, {"ev2", 1}, {"eu2", 1}, {"ev4", 0}, {"eu4", 0}, {"o", 0}});
  b.trans("t1", {"i"}, {"e0"});
  b.trans("t2", {"e0"}, {"o"});
  b.trans("t3", {"e0"}, {"ev2", "eu4"});
  b.trans("t4", {"e0"}, {"eu2", "ev4"});
  b.trans("t5", {"ev2"}, {"ev4"});
  b.trans("t6", {"eu2"}, {"eu4"});
  b.trans("t7", {"eu4", "ev4"}, {"e0"});
  return b.build({"i"}, {"o"});
}

}  // namespace

Graph fig7_graph() {
  Graph g;
  for (int v = 1; v <= 5; ++v) g.add_vertex("v" + std::to_string(v));
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(1, 2);
  g.add_edge(1, 3);
  g.add_edge(1, 4);
  return g;
}

WorkflowNet fixture(FixtureName name) {
  switch (name) {
    case FixtureName::fig1a: return fig1(true);
    case FixtureName::fig1b: return fig1(false);
    case FixtureName::fig4: return fig4();
    case FixtureName::fig5: return fig5();
    case FixtureName::fig6: return fig6();
    case FixtureName::fig8: return mis_to_workflow(fig7_graph());
  }
  throw std::invalid_argument("unknown fixture");
}

WorkflowNet fixture(std::string_view name) { return fixture(fixture_from_string(name)); }

}  // namespace wfthresh
