#include <gtest/gtest.h>

#include <json.hpp>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "random_nets.hpp"
#include "wfthresh/cli.hpp"
#include "wfthresh/explore.hpp"
#include "wfthresh/gadgets.hpp"
#include "wfthresh/netfile.hpp"
#include "wfthresh/record.hpp"
#include "wfthresh/scheduling.hpp"
#include "wfthresh/threshold.hpp"

using namespace wfthresh;
namespace t = wfthresh::testing;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const fs::path kSource = WFTHRESH_SOURCE_DIR;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wfthresh");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

ordered_json cli_json(std::vector<std::string> args, int expected_code = kExitDone) {
  const auto r = cli(std::move(args));
  EXPECT_EQ(r.code, expected_code) << r.err;
  return ordered_json::parse(r.out);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("wfthresh_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::size_t error_line(const std::string& text) {
  try {
    parse_net(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return 0;
}

const std::string kHeader = "place i\nplace a\nplace o\n";

}  // namespace

TEST(NetFile, FixtureFilesMatchBuiltins) {
  for (FixtureName f : all_fixtures()) {
    const auto path = kSource / "fixtures" / (std::string(to_string(f)) + ".wfn");
    EXPECT_EQ(load_net(path.string()), fixture(f)) << to_string(f);
  }
}

TEST(NetFile, RoundTripFixtures) {
  for (FixtureName f : all_fixtures()) {
    const auto wf = fixture(f);
    const auto text = render_net(wf);
    const auto back = parse_net(text);
    EXPECT_EQ(back, wf) << to_string(f);
    EXPECT_EQ(render_net(back), text);
  }
}

TEST(NetFile, GrammarDetails) {
  const auto wf = parse_net(
      "# comment line\n"
      "trans t1 : i -> a,b   # forward reference to places\n"
      "place i\n\tplace a tau 3\nplace b\nplace o\n"
      "trans t2 : a, b -> o\n"
      "output o\ninput i\n");
  EXPECT_EQ(wf.net().num_places(), 4u);
  EXPECT_EQ(wf.duration(wf.net().place("a")), 3u);
  EXPECT_EQ(wf.net().postset("t1"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(wf.d_policy(), DPolicy::positive);
  EXPECT_EQ(wf.d_places(), (std::vector<PlaceIndex>{wf.net().place("a")}));
}

TEST(NetFile, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("place i\nplace i\n"), 2u);
  EXPECT_EQ(error_line(kHeader + "trans t : i -> zz\ninput i\noutput o\n"), 4u);
  EXPECT_EQ(error_line(kHeader + "trans t : i i -> a\ninput i\noutput o\n"), 4u);
  EXPECT_EQ(error_line(kHeader + "trans t : i -> a a\ninput i\noutput o\n"), 4u);
  EXPECT_EQ(error_line(kHeader + "trans t : i -> a\ntrans t : a -> o\ninput i\noutput o\n"), 5u);
  EXPECT_EQ(error_line(kHeader + "trans a : i -> o\ninput i\noutput o\n"), 4u);
  EXPECT_EQ(error_line(kHeader + "input i\ninput a\noutput o\n"), 5u);
  EXPECT_EQ(error_line(kHeader + "input i\noutput o\ndset positive\ndset positive\n"), 7u);
  EXPECT_EQ(error_line(kHeader + "input i\noutput o\ndset most\n"), 6u);
  EXPECT_EQ(error_line(kHeader + "arc i a\ninput i\noutput o\n"), 4u);
  EXPECT_EQ(error_line("place i tau -1\n"), 1u);
  EXPECT_EQ(error_line("place i tau x\n"), 1u);
  EXPECT_EQ(error_line(kHeader + "trans t : i a\ninput i\noutput o\n"), 4u);
  // Missing sections are reported at the last statement.
  EXPECT_EQ(error_line(kHeader + "output o\n"), 4u);
  EXPECT_EQ(error_line(kHeader + "input i\n"), 4u);
}

TEST(NetFile, EmptyPresetIsStructuralViolation) {
  const auto wf = parse_net(kHeader + "trans t0 : i -> a\ntrans t : -> a\ntrans t2 : a -> o\ninput i\noutput o\n");
  EXPECT_TRUE(wf.net().pre(wf.net().transition("t")).empty());
  const auto v = validate_workflow(wf);
  ASSERT_FALSE(v.empty());
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const StructuralViolation& s) {
    return s.kind == ViolationKind::off_path && s.node == "t";
  }));
}

TEST(NetFile, DsetPolicies) {
  const std::string body = kHeader + "trans t1 : i -> a\ntrans t2 : a -> o\ninput i\noutput o\n";
  const auto all = parse_net(body + "dset all-but-output\n");
  EXPECT_EQ(all.d_policy(), DPolicy::all_but_output);
  EXPECT_EQ(all.d_places(), (std::vector<PlaceIndex>{0, 1}));
  const auto expl = parse_net(body + "dset explicit o a\n");
  EXPECT_EQ(expl.d_places(), (std::vector<PlaceIndex>{1, 2}));
  EXPECT_EQ(parse_net(render_net(expl)), expl);
  // With D = P \ O the fig1a threshold is unchanged: i is never marked beside another place.
  auto a = fixture(FixtureName::fig1a);
  a.set_d_policy(DPolicy::all_but_output);
  EXPECT_EQ(exact_ct(a).value, std::optional<std::uint64_t>(3));
}

TEST(NetFile, Pnml) {
  const std::string xml = R"(<?xml version="1.0"?>
<pnml><net id="n" type="http://www.pnml.org/version-2009/grammar/ptnet"><page id="pg">
  <place id="i"><initialMarking><text>1</text></initialMarking></place>
  <place id="a"/><place id="b"/><place id="o"/>
  <transition id="t1"/><transition id="t2"/><transition id="t3"/>
  <arc id="x1" source="i" target="t1"/><arc id="x2" source="t1" target="a"/>
  <arc id="x3" source="t1" target="b"/><arc id="x4" source="a" target="t2"/>
  <arc id="x5" source="b" target="t2"/><arc id="x6" source="t2" target="o"/>
  <arc id="x7" source="a" target="t3"/><arc id="x8" source="t3" target="a"/>
</page></net></pnml>)";
  const auto wf = parse_pnml(xml);
  EXPECT_EQ(wf.net().num_places(), 4u);
  EXPECT_EQ(wf.net().num_transitions(), 3u);
  EXPECT_EQ(wf.inputs(), (std::vector<PlaceIndex>{wf.net().place("i")}));
  EXPECT_EQ(wf.outputs(), (std::vector<PlaceIndex>{wf.net().place("o")}));
  EXPECT_EQ(wf.d_policy(), DPolicy::all_but_output);
  EXPECT_EQ(exact_ct(wf).value, std::optional<std::uint64_t>(2));
  EXPECT_THROW(parse_pnml("<pnml><net><place id=\"p\"></net></pnml>"), ParseError);
  EXPECT_THROW(parse_pnml("<other/>"), ParseError);
}

TEST(Report, EmptyThrows) { EXPECT_THROW(report({}), std::invalid_argument); }

TEST(Report, SingleRecord) {
  const auto rec = analyze("fig6", fixture(FixtureName::fig6));
  const auto j = report({rec});
  EXPECT_EQ(j["nets"], 1);
  for (const char* col : {"places", "transitions", "concurrency_threshold"}) {
    EXPECT_EQ(j[col]["median"], j[col]["mean"]) << col;
    EXPECT_EQ(j[col]["mean"], j[col]["max"]) << col;
  }
  EXPECT_EQ(j["concurrency_threshold"]["max"], 1.0);
}

TEST(Report, StripTimingsIsRecursive) {
  const auto j = ordered_json::parse(R"({"a":1,"timings_ms":2,"b":{"timings_ms":3,"c":[{"timings_ms":4}]}})");
  const auto s = strip_timings(j);
  EXPECT_EQ(s.dump(), R"({"a":1,"b":{"c":[{}]}})");
}

TEST(Record, RationalsAreStrings) {
  const auto wf = fixture(FixtureName::fig5);
  const auto j = to_json(wf, analyze("fig5", wf));
  EXPECT_EQ(j["threshold"]["upper_rational"], "3/1");
  EXPECT_EQ(j["threshold"]["exact"], 2);
  EXPECT_EQ(j["threshold"]["upper_integer"], 2);
  EXPECT_EQ(j["resource_threshold"]["status"], "computed");
}

TEST(Golden, FixtureRecords) {
  for (FixtureName f : all_fixtures()) {
    const auto name = std::string(to_string(f)) + ".wfn";
    const auto path = kSource / "tests" / "golden" / (std::string(to_string(f)) + ".json");
    std::ifstream in(path);
    ASSERT_TRUE(in) << path;
    const auto want = ordered_json::parse(in);
    const auto wf = fixture(f);
    const auto got = strip_timings(to_json(wf, analyze(name, wf)));
    EXPECT_EQ(got.dump(2), want.dump(2)) << name;
  }
}

TEST(Cli, ClassifyFig1b) {
  const auto r = cli({"classify", "fixture:fig1b"});
  EXPECT_EQ(r.code, kExitDone);
  EXPECT_EQ(ordered_json::parse(r.out).dump(), R"({"marked_graph":true,"free_choice":true,"acyclic":true})");
  const auto file = cli({"classify", (kSource / "fixtures" / "fig1b.wfn").string()});
  EXPECT_EQ(file.out, r.out);
}

TEST(Cli, BoundsFig6) {
  const auto j = cli_json({"ct", "--bounds", "fixture:fig6"});
  EXPECT_EQ(j["exact"], 1);
  EXPECT_EQ(j["upper_integer"], 2);
  EXPECT_EQ(j["upper_rational"], "2/1");
  EXPECT_EQ(j["lp_gap"], true);
  EXPECT_EQ(cli_json({"ct", "fixture:fig6"}), j);
}

TEST(Cli, LpModes) {
  const auto q = cli_json({"ct", "--lp-q", "fixture:fig5"});
  EXPECT_EQ(q["status"], "optimal");
  EXPECT_EQ(q["upper_rational"], "3/1");
  const auto z = cli_json({"ct", "--lp-z", "fixture:fig5"});
  EXPECT_EQ(z["upper_integer"], 2);
}

TEST(Cli, ExactWithinAndBeyondLimit) {
  const auto ok = cli_json({"ct", "--exact", "fixture:fig8"});
  EXPECT_EQ(ok["exact"], 13);
  EXPECT_EQ(ok["complete"], true);
  const auto cut = cli_json({"ct", "--exact", "--limit", "40", "fixture:fig8"}, kExitInconclusive);
  EXPECT_TRUE(cut["exact"].is_null());
  EXPECT_EQ(cut["complete"], false);
}

TEST(Cli, AtLeast) {
  const auto hit = cli_json({"ct", "--at-least", "13", "fixture:fig8"});
  EXPECT_EQ(hit["found"], true);
  EXPECT_GE(hit["witness"]["value"].get<int>(), 13);
  const auto miss = cli_json({"ct", "--at-least", "2", "fixture:fig6"});
  EXPECT_EQ(miss["found"], false);
  EXPECT_EQ(miss["depth_cap"], 84);
  // A fixed cap is not known to cover the state space.
  cli_json({"ct", "--at-least", "2", "--depth-cap", "3", "fixture:fig6"}, kExitInconclusive);
}

TEST(Cli, Soundness) {
  const auto j = cli_json({"soundness", "fixture:fig1a"});
  EXPECT_EQ(j["verdict"], "sound");
  EXPECT_EQ(j["one_safe"], true);
  cli_json({"soundness", "--limit", "3", "fixture:fig8"}, kExitInconclusive);
}

TEST(Cli, TminAndRt) {
  const auto tm = cli_json({"tmin", "fixture:fig1b", "t1", "t2", "t3", "t6", "t7", "t8"});
  EXPECT_EQ(tm["t_min"], 6);
  EXPECT_EQ(tm["is_run"], true);
  EXPECT_EQ(cli_json({"tmin", "fixture:fig1b", "t1,t2,t3,t6,t7,t8"}), tm);
  const auto rt = cli_json({"rt", "fixture:fig4"});
  EXPECT_EQ(rt["threshold"], 3);
  EXPECT_EQ(rt["runs"].size(), 2u);
  for (const auto& row : rt["runs"]) EXPECT_EQ(row["t_min"], 5);
  cli_json({"rt", "--runs-limit", "1", "fixture:fig4"}, kExitInconclusive);
  EXPECT_EQ(cli({"rt", "fixture:fig1a"}).code, kExitInputError);
}

TEST(Cli, InputErrors) {
  TempDir dir;
  const auto bad = dir.write("bad.wfn", "place i\nplace i\n");
  const auto r = cli({"classify", bad.string()});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"classify", (dir.path() / "missing.wfn").string()}).code, kExitInputError);
  EXPECT_EQ(cli({}).code, kExitInputError);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitInputError);
  EXPECT_EQ(cli({"ct", "--exact", "--lp-q", "fixture:fig6"}).code, kExitInputError);
  EXPECT_EQ(cli({"ct", "--limit", "0", "fixture:fig6"}).code, kExitInputError);
  EXPECT_EQ(cli({"ct", "--limit", "abc", "fixture:fig6"}).code, kExitInputError);
  EXPECT_EQ(cli({"ct", "--depth-cap", "sometimes", "fixture:fig6"}).code, kExitInputError);
  EXPECT_EQ(cli({"tmin", "fixture:fig1b", "t1", "t8"}).code, kExitInputError);
  EXPECT_EQ(cli({"tmin", "fixture:fig1b", "nope"}).code, kExitInputError);
  EXPECT_EQ(cli({"classify", "fixture:fig99"}).code, kExitInputError);
  EXPECT_EQ(cli({"gen", "sched", "--jobs", bad.string(), "--machines", "1", "--deadline", "0"}).code,
            kExitInputError);
  EXPECT_EQ(cli({"batch", dir.path().string()}).code, kExitInputError);
  EXPECT_EQ(cli({"--help"}).code, kExitDone);
}

TEST(Cli, GenMis) {
  TempDir dir;
  const auto g = dir.write("g.txt", "v1 v2\nv1 v3\nv2 v3\nv2 v4\nv4 v5\n");
  const auto r = cli({"gen", "mis", "--graph", g.string()});
  ASSERT_EQ(r.code, kExitDone) << r.err;
  const auto wf = parse_net(r.out);
  EXPECT_EQ(wf, mis_to_workflow(parse_graph("v1 v2\nv1 v3\nv2 v3\nv2 v4\nv4 v5\n")));
  EXPECT_EQ(exact_ct(wf).value, std::optional<std::uint64_t>(2 * 5 + 2));
}

TEST(Cli, GenSched) {
  TempDir dir;
  const auto jobs = dir.write("jobs.txt", "a 1\nb 1\nc 1\n");
  const auto r = cli({"gen", "sched", "--jobs", jobs.string(), "--machines", "3", "--deadline", "1"});
  ASSERT_EQ(r.code, kExitDone) << r.err;
  EXPECT_EQ(r.out.rfind("# k' = 4\n", 0), 0u);
  const auto wf = parse_net(r.out);
  EXPECT_TRUE(is_marked_graph(wf.net()));
  EXPECT_EQ(resource_threshold_net(wf).threshold, 4u);
}

TEST(Cli, BatchFixtures) {
  const auto r = cli({"batch", (kSource / "fixtures").string()});
  ASSERT_EQ(r.code, kExitDone) << r.err;
  const auto j = ordered_json::parse(r.out);
  ASSERT_EQ(j["records"].size(), 6u);
  std::vector<std::string> names;
  for (const auto& rec : j["records"]) {
    names.push_back(rec["name"]);
    EXPECT_FALSE(rec["threshold"]["exact"].is_null()) << rec["name"];
  }
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
  EXPECT_EQ(j["summary"]["nets"], 6);
  EXPECT_EQ(j["summary"]["exact"], 6);
  EXPECT_EQ(j["summary"]["concurrency_threshold"]["max"], 13.0);
  // Records agree with the golden files.
  for (const auto& rec : j["records"]) {
    const std::string stem = fs::path(rec["name"].get<std::string>()).stem().string();
    std::ifstream in(kSource / "tests" / "golden" / (stem + ".json"));
    ASSERT_TRUE(in) << stem;
    EXPECT_EQ(strip_timings(rec).dump(), ordered_json::parse(in).dump()) << stem;
  }
}

TEST(Cli, BatchReportsBadFiles) {
  TempDir dir;
  dir.write("a.wfn", render_net(fixture(FixtureName::fig6)));
  dir.write("b.wfn", "place i\n");
  dir.write("c.txt", "ignored");
  const auto r = cli({"batch", dir.path().string()});
  EXPECT_EQ(r.code, kExitInputError);
  const auto j = ordered_json::parse(r.out);
  ASSERT_EQ(j["records"].size(), 2u);
  EXPECT_EQ(j["records"][0]["name"], "a.wfn");
  EXPECT_TRUE(j["records"][1].contains("error"));
  EXPECT_EQ(j["summary"]["nets"], 1);
}

// Invariants.

TEST(CliIoInvariant, RoundTripRandomNets) {
  std::mt19937_64 rng(81);
  for (int i = 0; i < 300; ++i) {
    auto wf = t::random_block_net(rng, {.max_places = 25, .max_tau = 4});
    switch (i % 3) {
      case 0: break;
      case 1: wf.set_d_policy(DPolicy::all_but_output); break;
      default: {
        std::vector<PlaceIndex> d;
        for (PlaceIndex p = 0; p < wf.net().num_places(); ++p)
          if (rng() % 2) d.push_back(p);
        wf.set_d_policy(DPolicy::explicit_set, d);
      }
    }
    const auto text = render_net(wf);
    const auto back = parse_net(text);
    ASSERT_EQ(back, wf) << text;
    EXPECT_EQ(back.durations(), wf.durations());
    EXPECT_EQ(back.d_mask(), wf.d_mask());
    EXPECT_EQ(render_net(back), text);
  }
}

TEST(CliIoInvariant, ExactNeverFabricatesBeyondLimit) {
  std::mt19937_64 rng(82);
  TempDir dir;
  for (int i = 0; i < 40; ++i) {
    const auto wf = t::random_block_net(rng, {});
    const auto path = dir.write("n.wfn", render_net(wf));
    const auto states = explore(wf.net(), wf.initial_marking()).size();
    const std::size_t limit = 1 + rng() % (states + 2);
    const auto r = cli({"ct", "--exact", "--limit", std::to_string(limit), path.string()});
    const auto j = ordered_json::parse(r.out);
    if (limit >= states) {
      EXPECT_EQ(r.code, kExitDone);
      EXPECT_EQ(j["exact"], *exact_ct(wf).value);
    } else {
      EXPECT_EQ(r.code, kExitInconclusive);
      EXPECT_TRUE(j["exact"].is_null());
    }
  }
}
