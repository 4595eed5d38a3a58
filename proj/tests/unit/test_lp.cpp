#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "random_nets.hpp"
#include "wfthresh/gadgets.hpp"
#include "wfthresh/lp.hpp"
#include "wfthresh/netfile.hpp"
#include "wfthresh/threshold.hpp"

using namespace wfthresh;
namespace t = wfthresh::testing;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

LinearConstraint row(std::vector<std::pair<std::size_t, Rational>> terms, Relation rel, Rational rhs) {
  return LinearConstraint{std::move(terms), rel, std::move(rhs), ""};
}

std::vector<Rational> x_of(const WorkflowNet& wf, std::initializer_list<long> xs) {
  std::vector<Rational> out;
  for (long x : xs) out.emplace_back(x);
  EXPECT_EQ(out.size(), wf.net().num_transitions());
  return out;
}

void expect_exact(const LpProblem& lp, const LpSolution& s) {
  ASSERT_EQ(s.status, LpStatus::optimal);
  const auto res = residuals(lp, s.assignment);
  ASSERT_EQ(res.size(), lp.constraints.size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    switch (lp.constraints[i].relation) {
      case Relation::eq: EXPECT_EQ(res[i], 0); break;
      case Relation::le: EXPECT_LE(res[i], 0); break;
      case Relation::ge: EXPECT_GE(res[i], 0); break;
    }
  }
  EXPECT_TRUE(satisfies(lp, s.assignment));
  EXPECT_EQ(objective_value(lp, s.assignment), s.value);
}

}  // namespace

TEST(Fraction, RoundTrip) {
  EXPECT_EQ(to_fraction_string(q(3)), "3/1");
  EXPECT_EQ(to_fraction_string(q(6, 4)), "3/2");
  EXPECT_EQ(to_fraction_string(q(-1, 3)), "-1/3");
  EXPECT_EQ(parse_fraction("3/2"), q(3, 2));
  EXPECT_EQ(parse_fraction("4"), q(4));
  EXPECT_THROW(parse_fraction("x"), std::invalid_argument);
}

TEST(BuildMarkingLp, Fig1aDimensions) {
  const auto wf = fixture(FixtureName::fig1a);
  const auto m = build_marking_lp(wf);
  EXPECT_EQ(m.problem.constraints.size(), 11u);
  EXPECT_EQ(m.problem.num_vars, 19u);
  for (const auto& c : m.problem.constraints) {
    EXPECT_EQ(c.relation, Relation::eq);
    for (const auto& [v, a] : c.terms) EXPECT_EQ(a.get_den(), 1);
  }
  // Objective only on the M block.
  for (TransitionIndex tr = 0; tr < 8; ++tr) EXPECT_EQ(m.problem.objective[m.x_index(tr)], 0);
}

TEST(BuildMarkingLp, EmptyDGivesZero) {
  auto wf = fixture(FixtureName::fig1a);
  wf.set_d_policy(DPolicy::explicit_set, {});
  const auto m = build_marking_lp(wf);
  for (const auto& c : m.problem.objective) EXPECT_EQ(c, 0);
  const auto s = solve_rational(m.problem);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_EQ(s.value, 0);
}

TEST(BuildMarkingLp, Fig6HasTwoWeightedPlaces) {
  const auto wf = fixture(FixtureName::fig6);
  const auto m = build_marking_lp(wf);
  int ones = 0;
  for (PlaceIndex p = 0; p < wf.net().num_places(); ++p) ones += m.problem.objective[m.m_index(p)] == 1;
  EXPECT_EQ(ones, 2);
}

TEST(SolveRational, Fig5IsThree) {
  const auto wf = fixture(FixtureName::fig5);
  const auto m = build_marking_lp(wf);
  const auto s = solve_rational(m.problem);
  expect_exact(m.problem, s);
  EXPECT_EQ(s.value, 3);
  EXPECT_EQ(to_fraction_string(s.value), "3/1");
}

TEST(SolveRational, Fig5HalfSolutions) {
  const auto wf = fixture(FixtureName::fig5);
  const auto& n = wf.net();
  // Half a token through the two choice transitions and the join.
  std::vector<Rational> x(n.num_transitions(), 0);
  for (const char* name : {"ev1", "eu1", "join"}) x[n.transition(name)] = q(1, 2);
  EXPECT_EQ(t::marking_value(wf, x), std::optional<Rational>(3));
  // Half on every transition stays feasible but only reaches 1.
  const std::vector<Rational> halves(n.num_transitions(), q(1, 2));
  EXPECT_EQ(t::marking_value(wf, halves), std::optional<Rational>(1));
}

TEST(SolveRational, Fig1aIsThree) {
  const auto wf = fixture(FixtureName::fig1a);
  const auto m = build_marking_lp(wf);
  const auto s = solve_rational(m.problem);
  expect_exact(m.problem, s);
  EXPECT_EQ(s.value, 3);
}

TEST(VertexOracle, FrozenFixtureValues) {
  // Frozen from the basis-enumeration oracle.
  EXPECT_EQ(t::marking_lp_by_vertices(fixture(FixtureName::fig5)), std::optional<Rational>(3));
  EXPECT_EQ(t::marking_lp_by_vertices(fixture(FixtureName::fig1a)), std::optional<Rational>(3));
  EXPECT_EQ(t::marking_lp_by_vertices(fixture(FixtureName::fig6)), std::optional<Rational>(2));
  EXPECT_EQ(t::marking_lp_by_vertices(fixture(FixtureName::fig4)), std::optional<Rational>(5));
}

TEST(VertexOracle, AgreesWithSimplexOnFixtures) {
  for (FixtureName f : {FixtureName::fig1a, FixtureName::fig1b, FixtureName::fig4, FixtureName::fig5,
                        FixtureName::fig6}) {
    const auto wf = fixture(f);
    const auto s = solve_rational(build_marking_lp(wf).problem);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_EQ(std::optional<Rational>(s.value), t::marking_lp_by_vertices(wf)) << to_string(f);
  }
}

TEST(SolveInteger, Fig6IsTwoAtKnownWitness) {
  const auto wf = fixture(FixtureName::fig6);
  const auto m = build_marking_lp(wf);
  const auto s = solve_integer(m.problem);
  expect_exact(m.problem, s);
  EXPECT_EQ(s.value, 2);
  const auto x = x_of(wf, {1, 0, 1, 1, 0, 0, 1});
  EXPECT_EQ(t::marking_value(wf, x), std::optional<Rational>(2));
  EXPECT_TRUE(satisfies(m.problem, marking_assignment(wf, x)));
  EXPECT_EQ(objective_value(m.problem, marking_assignment(wf, x)), 2);
}

TEST(SolveInteger, Fig5IsTwo) {
  const auto wf = fixture(FixtureName::fig5);
  const auto m = build_marking_lp(wf);
  const auto s = solve_integer(m.problem);
  expect_exact(m.problem, s);
  EXPECT_EQ(s.value, 2);
  for (const auto& v : s.assignment) EXPECT_EQ(v.get_den(), 1);
}

TEST(BoxOracle, FrozenFixtureValues) {
  // Frozen from exhaustive integer boxes; ranges cover every reachable count.
  EXPECT_EQ(t::marking_ilp_by_box(fixture(FixtureName::fig5), 2), 2u);
  EXPECT_EQ(t::marking_ilp_by_box(fixture(FixtureName::fig6), 3), 2u);
  EXPECT_EQ(t::marking_ilp_by_box(fixture(FixtureName::fig1a), 2), 3u);
  EXPECT_EQ(t::marking_ilp_by_box(fixture(FixtureName::fig4), 2), 5u);
}

TEST(SolveInteger, MarkedGraphMatchesRational) {
  const auto wf = fixture(FixtureName::fig1b);
  const auto m = build_marking_lp(wf);
  const auto r = solve_rational(m.problem), z = solve_integer(m.problem);
  ASSERT_EQ(r.status, LpStatus::optimal);
  ASSERT_EQ(z.status, LpStatus::optimal);
  EXPECT_EQ(r.value, z.value);
  EXPECT_EQ(z.value, 3);
}

TEST(GenericLp, TextbookOptimum) {
  // max 3x + 5y; x <= 4; 2y <= 12; 3x + 2y <= 18.
  LpProblem lp{2, {q(3), q(5)}, {}, {"x", "y"}};
  lp.constraints = {row({{0, q(1)}}, Relation::le, q(4)), row({{1, q(2)}}, Relation::le, q(12)),
                    row({{0, q(3)}, {1, q(2)}}, Relation::le, q(18))};
  const auto s = solve_rational(lp);
  expect_exact(lp, s);
  EXPECT_EQ(s.value, 36);
  EXPECT_EQ(s.assignment[0], 2);
  EXPECT_EQ(s.assignment[1], 6);
}

TEST(GenericLp, FractionalOptimumAndIntegerGap) {
  // max x + y; 2x + 2y <= 3.
  LpProblem lp{2, {q(1), q(1)}, {row({{0, q(2)}, {1, q(2)}}, Relation::le, q(3))}, {"x", "y"}};
  EXPECT_EQ(solve_rational(lp).value, q(3, 2));
  const auto z = solve_integer(lp);
  expect_exact(lp, z);
  EXPECT_EQ(z.value, 1);
}

TEST(GenericLp, BealeDegenerateTerminates) {
  // Classic cycling instance for textbook pivoting rules.
  LpProblem lp{4, {q(3, 4), q(-150), q(1, 50), q(-6)}, {}, {"x4", "x5", "x6", "x7"}};
  lp.constraints = {row({{0, q(1, 4)}, {1, q(-60)}, {2, q(-1, 25)}, {3, q(9)}}, Relation::le, q(0)),
                    row({{0, q(1, 2)}, {1, q(-90)}, {2, q(-1, 50)}, {3, q(3)}}, Relation::le, q(0)),
                    row({{2, q(1)}}, Relation::le, q(1))};
  const auto s = solve_rational(lp);
  expect_exact(lp, s);
  EXPECT_EQ(s.value, q(1, 20));
}

TEST(GenericLp, InfeasibleAndUnbounded) {
  LpProblem bad{1, {q(1)}, {row({{0, q(1)}}, Relation::ge, q(2)), row({{0, q(1)}}, Relation::le, q(1))}, {"x"}};
  EXPECT_EQ(solve_rational(bad).status, LpStatus::infeasible);
  EXPECT_EQ(solve_integer(bad).status, LpStatus::infeasible);
  LpProblem open{2, {q(1), q(0)}, {row({{0, q(1)}, {1, q(-1)}}, Relation::le, q(1))}, {"x", "y"}};
  EXPECT_EQ(solve_rational(open).status, LpStatus::unbounded);
  EXPECT_EQ(solve_integer(open).status, LpStatus::unbounded);
}

TEST(GenericLp, IntegerInfeasibleButRationalFeasible) {
  // 2x = 1 has no integer solution.
  LpProblem lp{1, {q(1)}, {row({{0, q(2)}}, Relation::eq, q(1))}, {"x"}};
  EXPECT_EQ(solve_rational(lp).status, LpStatus::optimal);
  EXPECT_EQ(solve_integer(lp).status, LpStatus::infeasible);
}

TEST(GenericLp, NodeLimit) {
  // Knapsack-like program that needs several branches.
  LpProblem lp{3, {q(5), q(4), q(3)}, {row({{0, q(2)}, {1, q(3)}, {2, q(1)}}, Relation::le, q(5)),
                                      row({{0, q(4)}, {1, q(1)}, {2, q(2)}}, Relation::le, q(11)),
                                      row({{0, q(3)}, {1, q(4)}, {2, q(2)}}, Relation::le, q(8))},
               {"a", "b", "c"}};
  const auto full = solve_integer(lp);
  expect_exact(lp, full);
  EXPECT_EQ(full.value, 13);
  const auto cut = solve_integer(lp, {.node_limit = 1});
  if (full.nodes > 1) {
    EXPECT_EQ(cut.status, LpStatus::node_limit);
    EXPECT_TRUE(cut.assignment.empty());
  }
}

TEST(MarkingLp, UnboundedNet) {
  const auto wf = parse_net("place i\nplace a tau 1\nplace o\ntrans t : i -> o\ntrans g : -> a\ninput i\noutput o\n");
  const auto m = build_marking_lp(wf);
  EXPECT_EQ(solve_rational(m.problem).status, LpStatus::unbounded);
}

TEST(LpFormat, HasSections) {
  const auto text = to_lp_format(build_marking_lp(fixture(FixtureName::fig6)).problem);
  for (const char* s : {"Maximize", "Subject To", "Bounds", "End", "mark_"}) EXPECT_NE(text.find(s), std::string::npos);
}

// Invariants.

TEST(LpInvariant, SandwichOnRandomSoundNets) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 150; ++i) {
    const auto wf = t::random_block_net(rng, {});
    const auto m = build_marking_lp(wf);
    const auto r = solve_rational(m.problem);
    const auto z = solve_integer(m.problem);
    const auto ct = exact_ct(wf);
    expect_exact(m.problem, r);
    expect_exact(m.problem, z);
    ASSERT_TRUE(ct.value);
    EXPECT_GE(r.value, z.value);
    EXPECT_GE(z.value, Rational(static_cast<unsigned long>(*ct.value)));
  }
}

TEST(LpInvariant, LiveMarkedGraphsAllEqual) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 100; ++i) {
    const auto wf = t::random_live_marked_graph(rng, 30);
    ASSERT_TRUE(is_marked_graph(wf.net()));
    const auto m = build_marking_lp(wf);
    const auto r = solve_rational(m.problem);
    const auto z = solve_integer(m.problem);
    const auto ct = exact_ct(wf);
    ASSERT_EQ(r.status, LpStatus::optimal);
    ASSERT_TRUE(ct.value);
    const Rational exact(static_cast<unsigned long>(*ct.value));
    EXPECT_EQ(r.value, exact);
    EXPECT_EQ(z.value, exact);
  }
}

TEST(LpInvariant, AcyclicIntegerEqualsExact) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 150; ++i) {
    const auto wf = t::random_block_net(rng, {.max_places = 25, .allow_loop = false});
    ASSERT_TRUE(is_acyclic(wf.net()));
    const auto z = solve_integer(build_marking_lp(wf).problem);
    const auto ct = exact_ct(wf);
    ASSERT_TRUE(ct.value);
    EXPECT_EQ(z.value, Rational(static_cast<unsigned long>(*ct.value)));
  }
}

TEST(LpInvariant, SimplexMatchesVertexOracleOnSmallNets) {
  std::mt19937_64 rng(54);
  for (int i = 0; i < 40; ++i) {
    const auto wf = t::random_block_net(rng, {.max_places = 7});
    const auto s = solve_rational(build_marking_lp(wf).problem);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_EQ(std::optional<Rational>(s.value), t::marking_lp_by_vertices(wf));
  }
}

TEST(LpInvariant, IntegerMatchesBoxOracleOnSmallNets) {
  std::mt19937_64 rng(55);
  for (int i = 0; i < 40; ++i) {
    const auto wf = t::random_block_net(rng, {.max_places = 7, .max_branches = 2});
    if (wf.net().num_transitions() > 7) continue;
    const auto s = solve_integer(build_marking_lp(wf).problem);
    ASSERT_EQ(s.status, LpStatus::optimal);
    // Loops can push counts past any box, so only the bound direction is exact.
    const auto box = t::marking_ilp_by_box(wf, 3);
    EXPECT_GE(s.value, Rational(static_cast<unsigned long>(box)));
    if (is_acyclic(wf.net())) {
      EXPECT_EQ(s.value, Rational(static_cast<unsigned long>(box)));
    }
  }
}
