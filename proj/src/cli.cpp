#include "wfthresh/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "wfthresh/gadgets.hpp"
#include "wfthresh/lp.hpp"
#include "wfthresh/netfile.hpp"
#include "wfthresh/process.hpp"
#include "wfthresh/record.hpp"
#include "wfthresh/threshold.hpp"

namespace wfthresh {

using nlohmann::ordered_json;

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "fixture:<name>" selects a built-in net.
WorkflowNet open_net(const std::string& path) {
  if (path.rfind("fixture:", 0) == 0) return fixture(path.substr(8));
  return load_net(path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct DepthCap {
  enum class Mode { automatic, off, fixed } mode = Mode::automatic;
  std::uint64_t value = 0;
};

DepthCap parse_depth_cap(const std::string& s) {
  if (s == "auto") return {};
  if (s == "off") return {DepthCap::Mode::off, 0};
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size()) return {DepthCap::Mode::fixed, v};
  } catch (const std::exception&) {
  }
  throw InputError("--depth-cap expects auto, off or a number, got '" + s + "'");
}

// Resolved cap and whether it covers every reachable marking.
std::pair<std::optional<std::uint64_t>, bool> resolve_cap(const DepthCap& cap, const WorkflowNet& wf,
                                                          std::size_t limit) {
  switch (cap.mode) {
    case DepthCap::Mode::off: return {std::nullopt, true};
    case DepthCap::Mode::fixed: return {cap.value, false};
    case DepthCap::Mode::automatic: {
      auto c = auto_depth_cap(wf, limit);
      return {c, true};
    }
  }
  return {std::nullopt, true};
}

ordered_json assignment_json(const MarkingLp& mlp, const WorkflowNet& wf, const LpSolution& sol) {
  ordered_json m = ordered_json::object(), x = ordered_json::object();
  for (PlaceIndex p = 0; p < mlp.places && !sol.assignment.empty(); ++p)
    if (sgn(sol.assignment[mlp.m_index(p)]) != 0)
      m[wf.net().place_name(p)] = to_fraction_string(sol.assignment[mlp.m_index(p)]);
  for (TransitionIndex t = 0; t < mlp.transitions && !sol.assignment.empty(); ++t)
    if (sgn(sol.assignment[mlp.x_index(t)]) != 0)
      x[wf.net().transition_name(t)] = to_fraction_string(sol.assignment[mlp.x_index(t)]);
  return {{"M", m}, {"X", x}};
}

void emit(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

std::vector<std::string> split_sequence(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    std::string cur;
    for (char c : a) {
      if (c == ',' || c == ' ') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct BatchItem {
  std::string name;
  std::optional<WorkflowNet> net;
  std::optional<AnalysisRecord> record;
  std::string error;
};

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resource and concurrency thresholds of workflow nets", "wfthresh"};
  app.require_subcommand(1);

  std::string net_path;
  std::size_t limit = 1'000'000;

  auto* classify = app.add_subcommand("classify", "Structural classes of the net");
  classify->add_option("net", net_path, "Net file")->required();

  auto* soundness = app.add_subcommand("soundness", "Soundness by state-space exploration");
  soundness->add_option("net", net_path, "Net file")->required();
  soundness->add_option("--limit", limit, "State limit");

  auto* ct = app.add_subcommand("ct", "Concurrency threshold");
  ct->add_option("net", net_path, "Net file")->required();
  bool exact = false, lp_q = false, lp_z = false, bounds = false;
  std::optional<std::uint64_t> at_least;
  auto* mode = ct->add_option_group("mode");
  mode->add_flag("--exact", exact, "Full exploration");
  mode->add_flag("--lp-q", lp_q, "Rational marking-equation bound");
  mode->add_flag("--lp-z", lp_z, "Integer marking-equation bound");
  mode->add_flag("--bounds", bounds, "Combined bounds (default)");
  mode->add_option("--at-least", at_least, "Search a marking with conc >= K");
  mode->require_option(0, 1);
  ct->add_option("--limit", limit, "State limit");
  std::string depth_cap = "off";
  auto* cap_opt = ct->add_option("--depth-cap", depth_cap, "auto, off or a sequence length bound");

  auto* tmin = app.add_subcommand("tmin", "Minimal execution time of a run");
  tmin->add_option("net", net_path, "Net file")->required();
  std::vector<std::string> sequence;
  tmin->add_option("sequence", sequence, "Transition names, blank or comma separated")->required();

  auto* rt = app.add_subcommand("rt", "Resource threshold of an acyclic sound net");
  rt->add_option("net", net_path, "Net file")->required();
  std::size_t runs_limit = 1000;
  rt->add_option("--runs-limit", runs_limit, "Maximum number of runs");
  rt->add_option("--limit", limit, "State limit for the soundness check");

  auto* gen = app.add_subcommand("gen", "Reduction instance generators");
  gen->require_subcommand(1);
  auto* gen_mis = gen->add_subcommand("mis", "Net of the independence-number reduction");
  std::string graph_path;
  gen_mis->add_option("--graph", graph_path, "Edge list file")->required();
  auto* gen_sched = gen->add_subcommand("sched", "Marked graph of the scheduling reduction");
  std::string jobs_path;
  std::size_t machines = 0;
  Time deadline = 0;
  gen_sched->add_option("--jobs", jobs_path, "Job file")->required();
  gen_sched->add_option("--machines", machines, "Machines k")->required();
  gen_sched->add_option("--deadline", deadline, "Deadline t")->required()->check(CLI::PositiveNumber);

  auto* batch = app.add_subcommand("batch", "Analyse every .wfn and .pnml file of a directory");
  std::string dir;
  batch->add_option("dir", dir, "Directory")->required();
  batch->add_option("--limit", limit, "State limit");
  batch->add_option("--runs-limit", runs_limit, "Maximum number of runs for RT");

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitDone;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitDone;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (limit == 0) throw InputError("--limit must be positive");

    if (*classify) {
      const auto wf = open_net(net_path);
      emit(out, {{"marked_graph", is_marked_graph(wf.net())},
                 {"free_choice", is_free_choice(wf.net())},
                 {"acyclic", is_acyclic(wf.net())}});
      return kExitDone;
    }

    if (*soundness) {
      const auto wf = open_net(net_path);
      AnalysisRecord r;
      r.violations = validate_workflow(wf);
      r.soundness = check_soundness(wf, limit);
      auto j = to_json(wf, r);
      ordered_json o;
      o["structural_violations"] = j["structural_violations"];
      for (auto& [k, v] : j["soundness"].items()) o[k] = v;
      emit(out, o);
      return r.soundness.verdict == Verdict::unknown ? kExitInconclusive : kExitDone;
    }

    if (*ct) {
      const auto wf = open_net(net_path);
      const DepthCap cap = parse_depth_cap(*cap_opt ? depth_cap : (at_least ? "auto" : "off"));
      if (exact) {
        const auto r = exact_ct(wf, limit);
        ordered_json o;
        o["exact"] = r.value ? ordered_json(*r.value) : ordered_json(nullptr);
        o["lower"] = r.best.value;
        o["witness"] = witness_json(wf, r.best);
        o["states"] = r.states;
        o["complete"] = r.value.has_value();
        emit(out, o);
        return r.value ? kExitDone : kExitInconclusive;
      }
      if (lp_q || lp_z) {
        const auto mlp = build_marking_lp(wf);
        const auto sol = lp_q ? solve_rational(mlp.problem) : solve_integer(mlp.problem);
        ordered_json o;
        o["status"] = to_string(sol.status);
        const char* key = lp_q ? "upper_rational" : "upper_integer";
        if (sol.status != LpStatus::optimal)
          o[key] = nullptr;
        else if (lp_q)
          o[key] = to_fraction_string(sol.value);
        else
          o[key] = sol.value.get_num().get_ui();
        o["assignment"] = assignment_json(mlp, wf, sol);
        o["pivots"] = sol.pivots;
        if (lp_z) o["nodes"] = sol.nodes;
        emit(out, o);
        return sol.status == LpStatus::node_limit ? kExitInconclusive : kExitDone;
      }
      const auto [cap_value, sufficient] = resolve_cap(cap, wf, limit);
      if (at_least) {
        const auto r = ct_at_least(wf, *at_least, cap_value, limit);
        ordered_json o;
        o["k"] = *at_least;
        o["found"] = r.witness.has_value();
        o["witness"] = r.witness ? witness_json(wf, *r.witness) : ordered_json(nullptr);
        o["complete"] = r.complete;
        o["depth_cap"] = cap_value ? ordered_json(*cap_value) : ordered_json(nullptr);
        o["states"] = r.states;
        emit(out, o);
        const bool definitive = r.witness || (r.complete && sufficient);
        return definitive ? kExitDone : kExitInconclusive;
      }
      BoundsOptions b;
      b.limit = limit;
      b.depth_cap = cap_value;
      b.depth_cap_sufficient = sufficient;
      const auto r = combined_bounds(wf, b);
      emit(out, bounds_json(wf, r));
      return r.exact ? kExitDone : kExitInconclusive;
    }

    if (*tmin) {
      const auto wf = open_net(net_path);
      const auto names = split_sequence(sequence);
      const auto seq = transitions_of(wf.net(), names);
      const auto p = process_from_sequence(wf.net(), wf.initial_marking(), seq);
      const auto f = min_schedule(p, wf.durations());
      ordered_json sched = ordered_json::array();
      for (OccPlace q = 0; q < p.num_places(); ++q)
        sched.push_back({{"place", wf.net().place_name(p.place(q).label)}, {"start", f[q]}});
      emit(out, {{"t_min", t_min(p, wf.durations())}, {"is_run", is_run(wf, p)}, {"min_schedule", sched}});
      return kExitDone;
    }

    if (*rt) {
      const auto wf = open_net(net_path);
      if (!is_acyclic(wf.net())) throw InputError("resource threshold needs an acyclic net");
      const auto s = check_soundness(wf, limit);
      if (s.verdict == Verdict::unknown) {
        emit(out, {{"threshold", nullptr}, {"reason", "state limit"}});
        return kExitInconclusive;
      }
      if (!s.sound()) throw InputError("resource threshold needs a sound net");
      const auto runs = enumerate_runs(wf, runs_limit);
      if (runs.truncated) {
        emit(out, {{"threshold", nullptr}, {"reason", "runs limit"}});
        return kExitInconclusive;
      }
      ordered_json rows = ordered_json::array();
      std::size_t best = 0;
      for (const auto& run : runs.runs) {
        const auto r = resource_threshold_run(run, wf.durations());
        best = std::max(best, r.threshold);
        ordered_json sched = ordered_json::array();
        for (OccPlace q = 0; q < run.num_places(); ++q)
          sched.push_back({{"place", wf.net().place_name(run.place(q).label)}, {"start", r.witness.start[q]}});
        ordered_json seq = ordered_json::array();
        for (TransitionIndex t : canonical_sequence(run)) seq.push_back(wf.net().transition_name(t));
        rows.push_back({{"run", seq}, {"t_min", r.deadline}, {"threshold", r.threshold}, {"schedule", sched}});
      }
      emit(out, {{"threshold", best}, {"runs", rows}});
      return kExitDone;
    }

    if (*gen) {
      if (*gen_mis) {
        const Graph g = parse_graph(read_file(graph_path));
        out << "# independence-number reduction: " << g.vertices.size() << " vertices, " << g.edges.size()
            << " edges\n"
            << render_net(mis_to_workflow(g));
        return kExitDone;
      }
      JobInstance jobs = parse_jobs(read_file(jobs_path));
      jobs.machines = machines;
      jobs.deadline = deadline;
      const auto red = scheduling_to_marked_graph(jobs);
      out << "# k' = " << red.k_prime << '\n' << render_net(red.net);
      return kExitDone;
    }

    if (*batch) {
      namespace fs = std::filesystem;
      if (!fs::is_directory(dir)) throw InputError("'" + dir + "' is not a directory");
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".wfn" || ext == ".pnml")) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw InputError("no .wfn or .pnml files in '" + dir + "'");
      AnalysisOptions options;
      options.state_limit = limit;
      options.runs_limit = runs_limit;
      std::vector<std::future<BatchItem>> work;
      for (const auto& file : files) {
        work.push_back(std::async(std::launch::async, [file, options] {
          BatchItem item;
          item.name = file.filename().string();
          try {
            item.net = load_net(file.string());
            item.record = analyze(item.name, *item.net, options);
          } catch (const std::exception& e) {
            item.error = e.what();
          }
          return item;
        }));
      }
      ordered_json records = ordered_json::array();
      std::vector<AnalysisRecord> done;
      bool failed = false, inconclusive = false;
      for (auto& w : work) {
        BatchItem item = w.get();
        if (!item.record) {
          failed = true;
          records.push_back({{"name", item.name}, {"error", item.error}});
          continue;
        }
        inconclusive = inconclusive || item.record->inconclusive();
        records.push_back(to_json(*item.net, *item.record));
        done.push_back(std::move(*item.record));
      }
      ordered_json o;
      o["records"] = records;
      o["summary"] = done.empty() ? ordered_json(nullptr) : report(done);
      emit(out, o);
      if (failed) return kExitInputError;
      return inconclusive ? kExitInconclusive : kExitDone;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace wfthresh
