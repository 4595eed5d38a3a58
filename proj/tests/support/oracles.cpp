#include "oracles.hpp"

#include <functional>
#include <set>

namespace wfthresh::testing {

namespace {

// Solves A x = b for square A; nothing if singular.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

}  // namespace

std::optional<Rational> marking_lp_by_vertices(const WorkflowNet& wf) {
  const PetriNet& net = wf.net();
  const std::size_t np = net.num_places(), nt = net.num_transitions(), nv = np + nt;
  const auto inc = incidence(net);
  const auto d = wf.d_mask();
  const Marking m0 = wf.initial_marking();
  // Row p: M_p - sum_t N(p,t) X_t = M_I(p).
  std::vector<std::vector<Rational>> a(np, std::vector<Rational>(nv));
  std::vector<Rational> b(np);
  for (std::size_t p = 0; p < np; ++p) {
    a[p][p] = 1;
    for (std::size_t t = 0; t < nt; ++t) a[p][np + t] = -inc.at(p, t);
    b[p] = m0[p];
  }
  std::optional<Rational> best;
  std::vector<std::size_t> cols;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (cols.size() == np) {
      std::vector<std::vector<Rational>> sq(np, std::vector<Rational>(np));
      for (std::size_t r = 0; r < np; ++r)
        for (std::size_t c = 0; c < np; ++c) sq[r][c] = a[r][cols[c]];
      auto x = solve_square(sq, b);
      if (!x) return;
      Rational value = 0;
      for (std::size_t c = 0; c < np; ++c) {
        if ((*x)[c] < 0) return;
        if (cols[c] < np && d[cols[c]]) value += (*x)[c];
      }
      if (!best || value > *best) best = value;
      return;
    }
    for (std::size_t c = from; c + (np - cols.size()) <= nv; ++c) {
      cols.push_back(c);
      rec(c + 1);
      cols.pop_back();
    }
  };
  rec(0);
  return best;
}

std::uint64_t marking_ilp_by_box(const WorkflowNet& wf, std::uint64_t bound) {
  const PetriNet& net = wf.net();
  const auto inc = incidence(net);
  const auto d = wf.d_mask();
  const Marking m0 = wf.initial_marking();
  std::vector<std::int64_t> x(net.num_transitions(), 0);
  std::uint64_t best = 0;
  for (;;) {
    std::int64_t value = 0;
    bool ok = true;
    for (PlaceIndex p = 0; p < net.num_places() && ok; ++p) {
      std::int64_t m = m0[p];
      for (TransitionIndex t = 0; t < x.size(); ++t) m += inc.at(p, t) * x[t];
      if (m < 0) ok = false;
      if (d[p]) value += m;
    }
    if (ok) best = std::max(best, static_cast<std::uint64_t>(value));
    std::size_t i = 0;
    while (i < x.size() && x[i] == static_cast<std::int64_t>(bound)) x[i++] = 0;
    if (i == x.size()) break;
    ++x[i];
  }
  return best;
}

std::optional<Rational> marking_value(const WorkflowNet& wf, const std::vector<Rational>& x) {
  const PetriNet& net = wf.net();
  if (x.size() != net.num_transitions()) return std::nullopt;
  const auto inc = incidence(net);
  const auto d = wf.d_mask();
  const Marking m0 = wf.initial_marking();
  Rational value = 0;
  for (const auto& v : x)
    if (v < 0) return std::nullopt;
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    Rational m = m0[p];
    for (TransitionIndex t = 0; t < x.size(); ++t) m += inc.at(p, t) * x[t];
    if (m < 0) return std::nullopt;
    if (d[p]) value += m;
  }
  return value;
}

bool satisfies_marking_equation(const WorkflowNet& wf, std::span<const TransitionIndex> seq, const Marking& m) {
  const PetriNet& net = wf.net();
  const auto inc = incidence(net);
  std::vector<std::int64_t> counts(net.num_transitions(), 0);
  for (TransitionIndex t : seq) ++counts[t];
  const Marking m0 = wf.initial_marking();
  if (m.size() != net.num_places()) return false;
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    std::int64_t v = m0[p];
    for (TransitionIndex t = 0; t < counts.size(); ++t) v += inc.at(p, t) * counts[t];
    if (v != static_cast<std::int64_t>(m[p])) return false;
  }
  return true;
}

bool capacity_ok_everywhere(const Process& p, std::span<const Duration> tau, const Schedule& f, std::size_t k, Time t) {
  for (Time u = 0; u < t; ++u) {
    std::size_t active = 0;
    for (OccPlace q = 0; q < p.num_places(); ++q) {
      const Duration d = tau[p.place(q).label];
      if (f.start[q] <= u && u < f.start[q] + d) ++active;
    }
    if (active > k) return false;
  }
  return true;
}

std::optional<std::uint64_t> ct_by_dfs(const WorkflowNet& wf, std::size_t limit) {
  const PetriNet& net = wf.net();
  std::set<std::vector<Token>> seen;
  std::vector<Marking> stack{wf.initial_marking()};
  seen.insert(stack.back().tokens());
  std::uint64_t best = 0;
  while (!stack.empty()) {
    const Marking m = stack.back();
    stack.pop_back();
    std::uint64_t c = 0;
    for (PlaceIndex p : wf.d_places()) c += m[p];
    best = std::max(best, c);
    for (TransitionIndex t = 0; t < net.num_transitions(); ++t) {
      bool on = true;
      for (PlaceIndex p : net.pre(t)) on = on && m[p] > 0;
      if (!on) continue;
      std::vector<Token> next = m.tokens();
      for (PlaceIndex p : net.pre(t)) --next[p];
      for (PlaceIndex p : net.post(t)) ++next[p];
      if (seen.insert(next).second) {
        if (seen.size() > limit) return std::nullopt;
        stack.emplace_back(std::move(next));
      }
    }
  }
  return best;
}

}  // namespace wfthresh::testing
