#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace cctest {

double dense_inner(const SparseSymMatrix& q, const SparseSymMatrix& x) {
  const Index n = q.dim();
  double s = 0.0;
  for (Index i = 1; i <= n; ++i)
    for (Index j = 1; j <= n; ++j) s += q.at(i, j) * x.at(i, j);
  return s;
}

Eigen::MatrixXd project_psd_jacobi(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n));
  std::vector<std::vector<long double>> v(n, std::vector<long double>(n, 0.0L));
  for (int i = 0; i < n; ++i) {
    v[i][i] = 1.0L;
    for (int j = 0; j < n; ++j)
      a[i][j] = static_cast<long double>(0.5 * (m(i, j) + m(j, i)));
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0.0L;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-36L) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(static_cast<double>(a[p][q])) < 1e-300) continue;
        long double theta = (a[q][q] - a[p][p]) / (2.0L * a[p][q]);
        long double t = (theta >= 0 ? 1.0L : -1.0L) /
                        (std::abs(static_cast<double>(theta)) +
                         std::sqrt(static_cast<double>(theta * theta + 1.0L)));
        long double c = 1.0L / std::sqrt(static_cast<double>(t * t + 1.0L));
        long double s = t * c;
        for (int k = 0; k < n; ++k) {
          long double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          long double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          long double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    long double lam = a[k][k];
    if (lam <= 0.0L) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out(i, j) += static_cast<double>(lam * v[i][k] * v[j][k]);
  }
  return out;
}

bool chordal_by_cycle_enumeration(const SparsityGraph& g) {
  const Index n = g.n();
  // Enumerate simple cycles of length >= 4 from each start node and look
  // for a chord; any chordless cycle refutes chordality.
  std::vector<Index> path;
  std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
  bool chordless = false;

  std::function<void(Index, Index)> extend = [&](Index start, Index v) {
    if (chordless) return;
    for (Index w : g.neighbors(v)) {
      if (chordless) return;
      if (w == start && path.size() >= 4) {
        bool has_chord = false;
        for (std::size_t i = 0; i < path.size() && !has_chord; ++i)
          for (std::size_t j = i + 1; j < path.size() && !has_chord; ++j) {
            bool adjacent_on_cycle =
                j == i + 1 || (i == 0 && j == path.size() - 1);
            if (!adjacent_on_cycle && g.has_edge(path[i], path[j]))
              has_chord = true;
          }
        if (!has_chord) chordless = true;
        continue;
      }
      if (w <= start || used[w]) continue;  // canonical: cycle min = start
      used[w] = true;
      path.push_back(w);
      extend(start, w);
      path.pop_back();
      used[w] = false;
    }
  };

  for (Index s = 1; s <= n && !chordless; ++s) {
    used.assign(static_cast<std::size_t>(n) + 1, false);
    used[s] = true;
    path = {s};
    extend(s, s);
  }
  return !chordless;
}

std::vector<std::vector<Index>> cliques_by_enumeration(const SparsityGraph& g) {
  const Index n = g.n();
  std::vector<std::vector<Index>> cliques;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Index> nodes;
    for (Index v = 1; v <= n; ++v)
      if (mask & (1u << (v - 1))) nodes.push_back(v);
    bool is_clique = true;
    for (std::size_t i = 0; i < nodes.size() && is_clique; ++i)
      for (std::size_t j = i + 1; j < nodes.size() && is_clique; ++j)
        if (!g.has_edge(nodes[i], nodes[j])) is_clique = false;
    if (!is_clique) continue;
    bool maximal = true;
    for (Index v = 1; v <= n && maximal; ++v) {
      if (mask & (1u << (v - 1))) continue;
      bool extends = true;
      for (Index u : nodes)
        if (!g.has_edge(u, v)) {
          extends = false;
          break;
        }
      if (extends) maximal = false;
    }
    if (maximal) cliques.push_back(nodes);
  }
  std::sort(cliques.begin(), cliques.end());
  return cliques;
}

std::vector<Index> cut_nodes_by_removal(const SparsityGraph& g) {
  const Index n = g.n();
  auto component_count = [&](Index skip) {
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    if (skip >= 1) seen[skip] = true;
    int comps = 0;
    for (Index s = 1; s <= n; ++s) {
      if (seen[s]) continue;
      ++comps;
      std::vector<Index> stack{s};
      seen[s] = true;
      while (!stack.empty()) {
        Index v = stack.back();
        stack.pop_back();
        for (Index w : g.neighbors(v))
          if (!seen[w] && w != skip) {
            seen[w] = true;
            stack.push_back(w);
          }
      }
    }
    return comps;
  };
  int base = component_count(0);
  std::vector<Index> cuts;
  for (Index v = 1; v <= n; ++v) {
    if (g.neighbors(v).empty()) continue;
    if (component_count(v) > base) cuts.push_back(v);
  }
  return cuts;
}

cliquecop::SolveStatus full_dnn_reference(const ConicProblem& problem,
                                          const cliquecop::SolverConfig& cfg_in) {
  // Single-cone reference solves are much bigger than any clique block and
  // occasionally need a longer tail; they are test oracles, so spend it.
  cliquecop::SolverConfig cfg = cfg_in;
  cfg.max_iter = std::max(cfg.max_iter, 400000);
  cliquecop::Subproblem sub;
  for (Index v = 1; v <= problem.n(); ++v) sub.clique.push_back(v);
  sub.anchor = 1;
  sub.anchor_value = 1.0;
  sub.objective = cliquecop::restrict_to_clique(problem.objective(), sub.clique);
  for (const auto& c : problem.eq_constraints())
    sub.eq.push_back({c.id, cliquecop::restrict_to_clique(c.matrix, sub.clique)});
  for (const auto& c : problem.ineq_constraints())
    sub.ineq.push_back(
        {c.id, cliquecop::restrict_to_clique(c.matrix, sub.clique)});
  return cliquecop::solve_block(sub, cfg);
}

cliquecop::SolveStatus joint_pr_value(
    const ConicProblem& problem, const cliquecop::DecomposedProblem& dp,
    const std::vector<cliquecop::BackwardRecord>& records, int r,
    const cliquecop::SolverConfig& cfg_in) {
  cliquecop::SolverConfig cfg = cfg_in;
  cfg.max_iter = std::max(cfg.max_iter, 400000);
  // Union of the first r cliques.
  std::set<Index> span_set;
  for (int q = 1; q <= r; ++q)
    for (Index v : dp.tree.clique(q)) span_set.insert(v);
  std::vector<Index> span(span_set.begin(), span_set.end());

  cliquecop::Subproblem sub;
  sub.clique = span;
  sub.anchor = 1;
  sub.anchor_value = 1.0;
  sub.objective = cliquecop::restrict_to_clique(problem.objective(), sub.clique);
  // Fold the eliminated cliques' optima into the anchor coefficients.
  for (const auto& rec : records) {
    if (rec.clique_index <= r) continue;
    Index k = dp.tree.anchor.at(rec.clique_index);
    Index local = sub.local(k);
    if (local < 0) continue;
    if (rec.eta_tilde.is_infinite()) {
      if (std::find(sub.inf_diagonal.begin(), sub.inf_diagonal.end(), local) ==
          sub.inf_diagonal.end())
        sub.inf_diagonal.push_back(local);
    } else {
      sub.objective(local, local) += rec.eta_tilde.finite();
    }
  }
  for (int q = 1; q <= r; ++q) {
    const auto& part = dp.subproblems[static_cast<std::size_t>(q) - 1];
    for (const auto& c : part.eq) {
      const auto* full = problem.find_constraint(c.id);
      sub.eq.push_back(
          {c.id, cliquecop::restrict_to_clique(full->matrix, sub.clique)});
    }
    for (const auto& c : part.ineq) {
      const auto* full = problem.find_constraint(c.id);
      sub.ineq.push_back(
          {c.id, cliquecop::restrict_to_clique(full->matrix, sub.clique)});
    }
  }
  return cliquecop::solve_block(sub, cfg);
}

}  // namespace cctest
