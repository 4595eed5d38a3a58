#include "wfthresh/lp.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace wfthresh {

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_fraction(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("not a rational: " + text);
  q.canonicalize();
  return q;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::node_limit: return "node-limit";
  }
  return "?";
}

std::vector<Rational> residuals(const LpProblem& lp, const std::vector<Rational>& x) {
  std::vector<Rational> out;
  out.reserve(lp.constraints.size());
  for (const auto& c : lp.constraints) {
    Rational lhs = 0;
    for (const auto& [j, a] : c.terms) lhs += a * x.at(j);
    out.push_back(lhs - c.rhs);
  }
  return out;
}

bool satisfies(const LpProblem& lp, const std::vector<Rational>& x) {
  if (x.size() != lp.num_vars) return false;
  for (const auto& v : x)
    if (sgn(v) < 0) return false;
  const auto r = residuals(lp, x);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const int s = sgn(r[i]);
    switch (lp.constraints[i].relation) {
      case Relation::eq:
        if (s != 0) return false;
        break;
      case Relation::le:
        if (s > 0) return false;
        break;
      case Relation::ge:
        if (s < 0) return false;
        break;
    }
  }
  return true;
}

Rational objective_value(const LpProblem& lp, const std::vector<Rational>& x) {
  Rational v = 0;
  for (std::size_t j = 0; j < lp.num_vars; ++j)
    if (sgn(lp.objective[j]) != 0) v += lp.objective[j] * x.at(j);
  return v;
}

namespace {

// Dense tableau in canonical form with respect to `basis`. Column layout:
// structural variables, then slack/surplus columns, then artificials.
class Tableau {
 public:
  explicit Tableau(const LpProblem& lp) : n_(lp.num_vars) {
    const std::size_t m = lp.constraints.size();
    std::vector<LinearConstraint> rows = lp.constraints;
    for (auto& r : rows) {
      if (sgn(r.rhs) < 0) {
        for (auto& term : r.terms) term.second = -term.second;
        r.rhs = -r.rhs;
        if (r.relation == Relation::le) r.relation = Relation::ge;
        else if (r.relation == Relation::ge) r.relation = Relation::le;
      }
    }
    std::size_t slacks = 0;
    for (const auto& r : rows)
      if (r.relation != Relation::eq) ++slacks;

    // Structural columns usable as an initial basic variable: a single +1
    // entry in an equality row.
    std::vector<std::size_t> nonzeros(n_, 0);
    std::vector<std::optional<std::size_t>> unit_row(n_);
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& [j, a] : rows[i].terms) {
        if (sgn(a) == 0) continue;
        ++nonzeros[j];
        if (a == 1) unit_row[j] = i;
      }
    }
    std::vector<std::optional<std::size_t>> row_basis(m);
    for (std::size_t j = 0; j < n_; ++j) {
      if (nonzeros[j] != 1 || !unit_row[j]) continue;
      const std::size_t i = *unit_row[j];
      if (rows[i].relation == Relation::eq && !row_basis[i]) row_basis[i] = j;
    }

    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (rows[i].relation == Relation::ge || (rows[i].relation == Relation::eq && !row_basis[i])) ++artificials;

    first_artificial_ = n_ + slacks;
    cols_ = first_artificial_ + artificials;
    t_.assign(m, std::vector<Rational>(cols_));
    b_.resize(m);
    basis_.resize(m);
    std::size_t next_slack = n_, next_art = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& [j, a] : rows[i].terms) t_[i][j] += a;
      b_[i] = rows[i].rhs;
      switch (rows[i].relation) {
        case Relation::le:
          t_[i][next_slack] = 1;
          basis_[i] = next_slack++;
          break;
        case Relation::ge:
          t_[i][next_slack++] = -1;
          t_[i][next_art] = 1;
          basis_[i] = next_art++;
          break;
        case Relation::eq:
          if (row_basis[i]) {
            basis_[i] = *row_basis[i];
          } else {
            t_[i][next_art] = 1;
            basis_[i] = next_art++;
          }
          break;
      }
    }
    active_.assign(m, true);
  }

  bool has_artificials() const { return cols_ > first_artificial_; }

  // Returns false if unbounded.
  bool optimize(const std::vector<Rational>& cost, bool allow_artificial, std::uint64_t& pivots) {
    reduced_costs(cost);
    for (;;) {
      // Bland: lowest-index improving column.
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allow_artificial && j >= first_artificial_) break;
        if (sgn(obj_[j]) > 0) {
          enter = j;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (!active_[i] || sgn(t_[i][*enter]) <= 0) continue;
        Rational ratio = b_[i] / t_[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
      ++pivots;
    }
  }

  Rational value(const std::vector<Rational>& cost) const {
    Rational v = 0;
    for (std::size_t i = 0; i < t_.size(); ++i)
      if (active_[i] && basis_[i] < cost.size()) v += cost[basis_[i]] * b_[i];
    return v;
  }

  // After phase one: move zero-level artificials out of the basis or drop
  // their (redundant) rows.
  void expel_artificials(std::uint64_t& pivots) {
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (!active_[i] || basis_[i] < first_artificial_) continue;
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (sgn(t_[i][j]) != 0) {
          col = j;
          break;
        }
      }
      if (col) {
        pivot(i, *col);
        ++pivots;
      } else {
        active_[i] = false;
      }
    }
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> x(n_);
    for (std::size_t i = 0; i < t_.size(); ++i)
      if (active_[i] && basis_[i] < n_) x[basis_[i]] = b_[i];
    return x;
  }

  std::size_t columns() const { return cols_; }
  std::size_t first_artificial() const { return first_artificial_; }

 private:
  void reduced_costs(const std::vector<Rational>& cost) {
    obj_.assign(cols_, Rational(0));
    for (std::size_t j = 0; j < cost.size() && j < cols_; ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (!active_[i] || basis_[i] >= cost.size() || sgn(cost[basis_[i]]) == 0) continue;
      const Rational& cb = cost[basis_[i]];
      for (std::size_t j = 0; j < cols_; ++j)
        if (sgn(t_[i][j]) != 0) obj_[j] -= cb * t_[i][j];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < cols_; ++j)
      if (sgn(t_[r][j]) != 0) nz.push_back(j);
    const Rational inv = 1 / t_[r][c];
    for (std::size_t j : nz) t_[r][j] *= inv;
    b_[r] *= inv;
    Rational f;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == r || sgn(t_[i][c]) == 0) continue;
      f = t_[i][c];
      for (std::size_t j : nz) t_[i][j] -= f * t_[r][j];
      b_[i] -= f * b_[r];
    }
    if (sgn(obj_[c]) != 0) {
      f = obj_[c];
      for (std::size_t j : nz) obj_[j] -= f * t_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t n_;
  std::size_t cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> b_;
  std::vector<Rational> obj_;
  std::vector<std::size_t> basis_;
  std::vector<bool> active_;
};

}  // namespace

LpSolution solve_rational(const LpProblem& lp) {
  if (lp.objective.size() != lp.num_vars) throw std::invalid_argument("objective size mismatch");
  LpSolution sol;
  Tableau tab(lp);
  if (tab.has_artificials()) {
    std::vector<Rational> phase1(tab.columns(), Rational(0));
    for (std::size_t j = tab.first_artificial(); j < tab.columns(); ++j) phase1[j] = -1;
    tab.optimize(phase1, true, sol.pivots);
    if (sgn(tab.value(phase1)) < 0) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    tab.expel_artificials(sol.pivots);
  }
  if (!tab.optimize(lp.objective, false, sol.pivots)) {
    sol.status = LpStatus::unbounded;
    return sol;
  }
  sol.status = LpStatus::optimal;
  sol.assignment = tab.primal();
  sol.value = objective_value(lp, sol.assignment);
  return sol;
}

namespace {

struct VarBounds {
  std::map<std::size_t, mpz_class> lower, upper;
};

LpProblem with_bounds(const LpProblem& base, const VarBounds& bounds) {
  LpProblem lp = base;
  for (const auto& [j, v] : bounds.lower)
    lp.constraints.push_back({{{j, Rational(1)}}, Relation::ge, Rational(v), "lb_" + std::to_string(j)});
  for (const auto& [j, v] : bounds.upper)
    lp.constraints.push_back({{{j, Rational(1)}}, Relation::le, Rational(v), "ub_" + std::to_string(j)});
  return lp;
}

mpz_class floor_of(const Rational& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

}  // namespace

LpSolution solve_integer(const LpProblem& lp, const IntegerOptions& options) {
  bool integral_objective = true;
  for (const auto& c : lp.objective) integral_objective = integral_objective && c.get_den() == 1;

  struct Node {
    VarBounds bounds;
    LpSolution relaxation;
    std::uint64_t seq;
  };
  struct Order {
    bool operator()(const Node& a, const Node& b) const {
      if (a.relaxation.value != b.relaxation.value) return a.relaxation.value < b.relaxation.value;
      return a.seq > b.seq;
    }
  };

  LpSolution best;
  best.status = LpStatus::infeasible;
  std::uint64_t pivots = 0, nodes = 0, seq = 0;
  std::priority_queue<Node, std::vector<Node>, Order> open;

  auto relax = [&](VarBounds bounds) {
    ++nodes;
    LpSolution r = solve_rational(with_bounds(lp, bounds));
    pivots += r.pivots;
    return Node{std::move(bounds), std::move(r), seq++};
  };
  auto prunable = [&](const Rational& bound) {
    if (best.status != LpStatus::optimal) return false;
    if (integral_objective) return Rational(floor_of(bound)) <= best.value;
    return bound <= best.value;
  };

  Node root = relax({});
  if (root.relaxation.status == LpStatus::unbounded) {
    root.relaxation.nodes = nodes;
    return root.relaxation;
  }
  if (root.relaxation.status == LpStatus::optimal) open.push(std::move(root));

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (prunable(node.relaxation.value)) continue;
    // Most fractional variable; ties to the lowest index.
    std::optional<std::size_t> branch;
    Rational best_distance = -1;
    const auto& x = node.relaxation.assignment;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].get_den() == 1) continue;
      Rational frac = x[j] - Rational(floor_of(x[j]));
      Rational distance = frac < Rational(1, 2) ? frac : Rational(1) - frac;
      if (distance > best_distance) {
        best_distance = distance;
        branch = j;
      }
    }
    if (!branch) {
      if (best.status != LpStatus::optimal || node.relaxation.value > best.value) {
        best = node.relaxation;
      }
      continue;
    }
    if (nodes >= options.node_limit) {
      best.status = LpStatus::node_limit;
      break;
    }
    const mpz_class down = floor_of(x[*branch]);
    for (int side = 0; side < 2; ++side) {
      VarBounds b = node.bounds;
      if (side == 0) {
        auto it = b.upper.find(*branch);
        if (it == b.upper.end() || down < it->second) b.upper[*branch] = down;
      } else {
        auto it = b.lower.find(*branch);
        const mpz_class up = down + 1;
        if (it == b.lower.end() || up > it->second) b.lower[*branch] = up;
      }
      Node child = relax(std::move(b));
      if (child.relaxation.status == LpStatus::unbounded) {
        child.relaxation.nodes = nodes;
        return child.relaxation;
      }
      if (child.relaxation.status == LpStatus::optimal && !prunable(child.relaxation.value))
        open.push(std::move(child));
    }
  }
  best.pivots = pivots;
  best.nodes = nodes;
  if (best.status == LpStatus::node_limit) best.assignment.clear();
  return best;
}

MarkingLp build_marking_lp(const WorkflowNet& wf) {
  const PetriNet& net = wf.net();
  MarkingLp out;
  out.places = net.num_places();
  out.transitions = net.num_transitions();
  LpProblem& lp = out.problem;
  lp.num_vars = out.places + out.transitions;
  lp.objective.assign(lp.num_vars, Rational(0));
  for (PlaceIndex p : wf.d_places()) lp.objective[out.m_index(p)] = 1;
  for (PlaceIndex p = 0; p < out.places; ++p) lp.var_names.push_back("M_" + net.place_name(p));
  for (TransitionIndex t = 0; t < out.transitions; ++t) lp.var_names.push_back("X_" + net.transition_name(t));

  const auto n = incidence(net);
  const Marking m0 = wf.initial_marking();
  for (PlaceIndex p = 0; p < out.places; ++p) {
    LinearConstraint row;
    row.name = "mark_" + net.place_name(p);
    row.terms.emplace_back(out.m_index(p), Rational(1));
    for (TransitionIndex t = 0; t < out.transitions; ++t)
      if (n.at(p, t) != 0) row.terms.emplace_back(out.x_index(t), Rational(-n.at(p, t)));
    row.relation = Relation::eq;
    row.rhs = m0[p];
    lp.constraints.push_back(std::move(row));
  }
  return out;
}

std::vector<Rational> marking_assignment(const WorkflowNet& wf, const std::vector<Rational>& x_block) {
  const PetriNet& net = wf.net();
  if (x_block.size() != net.num_transitions()) throw std::invalid_argument("X vector size mismatch");
  const auto n = incidence(net);
  const Marking m0 = wf.initial_marking();
  std::vector<Rational> out(net.num_places() + net.num_transitions());
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    Rational m = m0[p];
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
      if (n.at(p, t) != 0) m += n.at(p, t) * x_block[t];
    out[p] = m;
  }
  std::copy(x_block.begin(), x_block.end(), out.begin() + static_cast<std::ptrdiff_t>(net.num_places()));
  return out;
}

namespace {

std::string lp_number(const Rational& q) {
  return q.get_den() == 1 ? q.get_num().get_str() : to_fraction_string(q);
}

std::string linear_expr(const std::vector<std::pair<std::size_t, Rational>>& terms,
                        const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [j, a] : terms) {
    if (sgn(a) == 0) continue;
    const Rational mag = abs(a);
    if (first) {
      if (sgn(a) < 0) os << "- ";
    } else {
      os << (sgn(a) < 0 ? " - " : " + ");
    }
    first = false;
    if (mag != 1) os << lp_number(mag) << ' ';
    os << (j < names.size() ? names[j] : "x" + std::to_string(j));
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace

std::string to_lp_format(const LpProblem& lp) {
  std::ostringstream os;
  std::vector<std::pair<std::size_t, Rational>> obj;
  for (std::size_t j = 0; j < lp.num_vars; ++j)
    if (sgn(lp.objective[j]) != 0) obj.emplace_back(j, lp.objective[j]);
  os << "Maximize\n obj: " << linear_expr(obj, lp.var_names) << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    const char* rel = c.relation == Relation::eq ? "=" : c.relation == Relation::le ? "<=" : ">=";
    os << ' ' << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ": " << linear_expr(c.terms, lp.var_names)
       << ' ' << rel << ' ' << lp_number(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars; ++j)
    os << ' ' << (j < lp.var_names.size() ? lp.var_names[j] : "x" + std::to_string(j)) << " >= 0\n";
  os << "End\n";
  return os.str();
}

}  // namespace wfthresh
