#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wfthresh/workflow.hpp"

namespace wfthresh {

using Rational = mpq_class;

/// "num/den", always with a denominator.
std::string to_fraction_string(const Rational& q);
Rational parse_fraction(const std::string& text);

enum class Relation { eq, le, ge };

struct LinearConstraint {
  std::vector<std::pair<std::size_t, Rational>> terms;  // (variable, coefficient)
  Relation relation = Relation::eq;
  Rational rhs;
  std::string name;
};

/// max objective . x  subject to the constraints and x >= 0.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<Rational> objective;
  std::vector<LinearConstraint> constraints;
  std::vector<std::string> var_names;
};

enum class LpStatus { optimal, infeasible, unbounded, node_limit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Rational value;
  std::vector<Rational> assignment;
  std::uint64_t pivots = 0;
  std::uint64_t nodes = 0;  // branch-and-bound nodes (integer solve only)
};

/// Row residuals (lhs - rhs) of an assignment.
std::vector<Rational> residuals(const LpProblem& lp, const std::vector<Rational>& x);
/// Exact feasibility: relations hold with zero slack error and x >= 0.
bool satisfies(const LpProblem& lp, const std::vector<Rational>& x);
Rational objective_value(const LpProblem& lp, const std::vector<Rational>& x);

/// Two-phase dense tableau simplex over exact rationals with Bland's rule.
LpSolution solve_rational(const LpProblem& lp);

struct IntegerOptions {
  std::uint64_t node_limit = 200000;
};

/// Best-first branch and bound on the rational relaxation; branches on the
/// most fractional variable (lowest index on ties).
LpSolution solve_integer(const LpProblem& lp, const IntegerOptions& options = {});

/// The marking-equation program of a workflow net: variables are M (one per
/// place) followed by X (one per transition); rows are M - N X = M_I.
struct MarkingLp {
  LpProblem problem;
  std::size_t places = 0;
  std::size_t transitions = 0;
  std::size_t m_index(PlaceIndex p) const { return p; }
  std::size_t x_index(TransitionIndex t) const { return places + t; }
};

MarkingLp build_marking_lp(const WorkflowNet& wf);

/// Assignment with the given X block and M = M_I + N X.
std::vector<Rational> marking_assignment(const WorkflowNet& wf, const std::vector<Rational>& x_block);

/// Human-readable CPLEX-LP style rendering.
std::string to_lp_format(const LpProblem& lp);

}  // namespace wfthresh
