#include "cliquecop/decompose.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace cliquecop {

Index Subproblem::local(Index global) const {
  auto it = std::lower_bound(clique.begin(), clique.end(), global);
  if (it == clique.end() || *it != global) return -1;
  return static_cast<Index>(it - clique.begin());
}

ExtReal Subproblem::objective_at(Index local_i, Index local_j) const {
  if (local_i == local_j &&
      std::find(inf_diagonal.begin(), inf_diagonal.end(), local_i) !=
          inf_diagonal.end())
    return ExtReal::infinity();
  return ExtReal(objective(local_i, local_j));
}

bool Subproblem::all_diagonal() const {
  for (Index i = 0; i < size(); ++i)
    for (Index j = i + 1; j < size(); ++j)
      if (objective(i, j) != 0.0) return false;
  for (const auto* group : {&eq, &ineq})
    for (const auto& c : *group)
      for (Index i = 0; i < size(); ++i)
        for (Index j = i + 1; j < size(); ++j)
          if (c.matrix(i, j) != 0.0) return false;
  return true;
}

double ObjectiveSplit::contribution(int r, const BlockSolution& block) const {
  const auto& q = per_clique.at(static_cast<std::size_t>(r) - 1);
  double s = 0.0;
  for (const auto& t : q.entries()) {
    auto pos = [&block](Index g) {
      auto it = std::lower_bound(block.clique.begin(), block.clique.end(), g);
      return static_cast<Index>(it - block.clique.begin());
    };
    double w = (t.i == t.j) ? 1.0 : 2.0;
    s += w * t.v * block.block(pos(t.i), pos(t.j));
  }
  return s;
}

Eigen::MatrixXd restrict_to_clique(const SparseSymMatrix& matrix,
                                   const std::vector<Index>& clique,
                                   bool check_support) {
  const Index m = static_cast<Index>(clique.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (const auto& t : matrix.entries()) {
    auto find = [&clique](Index g) -> Index {
      auto it = std::lower_bound(clique.begin(), clique.end(), g);
      if (it == clique.end() || *it != g) return -1;
      return static_cast<Index>(it - clique.begin());
    };
    Index li = find(t.i), lj = find(t.j);
    if (li < 0 || lj < 0) {
      if (check_support && t.v != 0.0)
        throw std::invalid_argument(
            "restrict_to_clique: entry (" + std::to_string(t.i) + "," +
            std::to_string(t.j) + ") outside clique");
      continue;
    }
    out(li, lj) = t.v;
    out(lj, li) = t.v;
  }
  return out;
}

DecomposedProblem decompose(const ConicProblem& problem, const CliqueTree& tree,
                            const CorrelativeAssignment& assignment) {
  if (!assignment.ok())
    throw std::invalid_argument(
        "decompose: correlative assignment has unassignable constraints");
  const int ell = tree.size();

  // Q0 support must be covered by the union of clique blocks.
  std::set<std::pair<Index, Index>> covered;
  for (const auto& c : tree.cliques)
    for (Index a : c)
      for (Index b : c)
        if (a <= b) covered.insert({a, b});
  for (const auto& t : problem.objective().entries())
    if (t.v != 0.0 && !covered.count({t.i, t.j}))
      throw std::invalid_argument("decompose: objective entry (" +
                                  std::to_string(t.i) + "," +
                                  std::to_string(t.j) +
                                  ") not covered by any clique");

  DecomposedProblem dp;
  dp.tree = tree;
  dp.assignment = assignment;
  dp.subproblems.reserve(static_cast<std::size_t>(ell));
  for (int r = 1; r <= ell; ++r) {
    Subproblem sub;
    sub.clique = tree.clique(r);
    sub.anchor = tree.anchor.at(r);
    sub.anchor_value = 1.0;
    sub.objective = restrict_to_clique(problem.objective(), sub.clique);
    dp.subproblems.push_back(std::move(sub));
  }
  for (const auto& c : problem.eq_constraints()) {
    int r = assignment.clique_of.at(c.id);
    auto& sub = dp.subproblems[static_cast<std::size_t>(r) - 1];
    sub.eq.push_back({c.id, restrict_to_clique(c.matrix, sub.clique, true)});
  }
  for (const auto& c : problem.ineq_constraints()) {
    int r = assignment.clique_of.at(c.id);
    auto& sub = dp.subproblems[static_cast<std::size_t>(r) - 1];
    sub.ineq.push_back({c.id, restrict_to_clique(c.matrix, sub.clique, true)});
  }

  // First-owning-clique objective split; sum identity is exact because each
  // entry lands in exactly one per-clique matrix.
  dp.split.per_clique.assign(static_cast<std::size_t>(ell),
                             SparseSymMatrix(problem.n()));
  for (const auto& t : problem.objective().entries()) {
    for (int r = 1; r <= ell; ++r) {
      const auto& c = tree.clique(r);
      if (std::binary_search(c.begin(), c.end(), t.i) &&
          std::binary_search(c.begin(), c.end(), t.j)) {
        dp.split.per_clique[static_cast<std::size_t>(r) - 1].insert(t.i, t.j,
                                                                    t.v);
        break;
      }
    }
  }
  return dp;
}

GluedSolution glue_gamma_solution(const std::vector<BlockSolution>& blocks,
                                  const CliqueTree& tree, Index n) {
  const int ell = tree.size();
  if (static_cast<int>(blocks.size()) != ell)
    throw std::invalid_argument("glue_gamma_solution: block count mismatch");
  const double rank_tol = 1e-8;

  // Rank-1 factor of each block with nonnegative orientation.
  std::vector<Eigen::VectorXd> factors(blocks.size());
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    const Eigen::MatrixXd& x = blocks[r].block;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    const Index m = static_cast<Index>(x.rows());
    double lead = eig.eigenvalues()(m - 1);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    if (lead > 0) y = std::sqrt(lead) * eig.eigenvectors().col(m - 1);
    Index imax;
    y.cwiseAbs().maxCoeff(&imax);
    if (y(imax) < 0) y = -y;
    double scale = std::max(1e-12, x.norm());
    if ((x - y * y.transpose()).norm() > rank_tol * scale)
      throw std::invalid_argument("glue_gamma_solution: block " +
                                  std::to_string(r + 1) +
                                  " is not rank-1 within tolerance");
    if (y.minCoeff() < -rank_tol)
      throw std::invalid_argument("glue_gamma_solution: block " +
                                  std::to_string(r + 1) +
                                  " factor has negative entries");
    factors[r] = y.cwiseMax(0.0);
  }

  GluedSolution out;
  out.x = Eigen::VectorXd::Zero(n);
  for (int r = 1; r <= ell; ++r) {
    const auto& clique = tree.clique(r);
    const auto& y = factors[static_cast<std::size_t>(r) - 1];
    const Index anchor = tree.anchor.at(r);
    if (r >= 2) {
      // Anchor value must agree with what the prefix already fixed.
      Index al = static_cast<Index>(
          std::lower_bound(clique.begin(), clique.end(), anchor) -
          clique.begin());
      double have = out.x(anchor - 1);
      if (std::abs(y(al) - have) > 1e-8 * (1.0 + std::abs(have)))
        throw std::invalid_argument(
            "glue_gamma_solution: anchor mismatch at clique " +
            std::to_string(r));
    }
    for (std::size_t li = 0; li < clique.size(); ++li) {
      Index g = clique[li];
      if (r >= 2 && g == anchor) continue;
      out.x(g - 1) = y(static_cast<Index>(li));
    }
  }
  return out;
}

Eigen::MatrixXd complete_dnn(const std::vector<BlockSolution>& blocks,
                             const CliqueTree& tree, Index n) {
  const int ell = tree.size();
  if (static_cast<int>(blocks.size()) != ell)
    throw std::invalid_argument("complete_dnn: block count mismatch");
  const double cone_tol = 1e-8;
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    const Eigen::MatrixXd& x = blocks[r].block;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    if (eig.eigenvalues()(0) < -cone_tol * (1.0 + x.norm()))
      throw std::invalid_argument("complete_dnn: block " +
                                  std::to_string(r + 1) + " is not PSD");
    if (x.minCoeff() < -1e-12 * (1.0 + x.norm()))
      throw std::invalid_argument("complete_dnn: block " +
                                  std::to_string(r + 1) +
                                  " has negative entries");
  }

  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
  std::vector<bool> placed(static_cast<std::size_t>(n) + 1, false);
  std::vector<Index> prefix;

  auto place_block = [&](int r) {
    const auto& clique = tree.clique(r);
    const auto& x = blocks[static_cast<std::size_t>(r) - 1].block;
    for (std::size_t a = 0; a < clique.size(); ++a)
      for (std::size_t b = 0; b < clique.size(); ++b)
        full(clique[a] - 1, clique[b] - 1) =
            x(static_cast<Index>(a), static_cast<Index>(b));
  };

  place_block(1);
  for (Index g : tree.clique(1)) {
    placed[g] = true;
    prefix.push_back(g);
  }

  for (int r = 2; r <= ell; ++r) {
    const auto& clique = tree.clique(r);
    const auto& x = blocks[static_cast<std::size_t>(r) - 1].block;
    const Index anchor = tree.anchor.at(r);
    Index al = static_cast<Index>(
        std::lower_bound(clique.begin(), clique.end(), anchor) -
        clique.begin());
    double kk_prev = full(anchor - 1, anchor - 1);
    double kk_new = x(al, al);
    if (std::abs(kk_prev - kk_new) > 1e-8 * (1.0 + std::abs(kk_prev)))
      throw std::invalid_argument("complete_dnn: anchor value mismatch at "
                                  "clique " +
                                  std::to_string(r));
    if (kk_prev <= 1e-14) {
      // PSD forces the whole anchor row of the block to vanish with it.
      double row_max = x.row(al).cwiseAbs().maxCoeff();
      if (row_max > std::sqrt(cone_tol) * (1.0 + x.norm()))
        throw std::invalid_argument(
            "complete_dnn: zero separator with nonzero anchor row at clique " +
            std::to_string(r));
    }
    // Cross entries between the prefix and the new nodes, routed through
    // the separator.  A zero separator forces the whole anchor row of the
    // block to zero (PSD), so zero fill is consistent.
    for (Index i : prefix) {
      if (i == anchor) continue;
      for (std::size_t lb = 0; lb < clique.size(); ++lb) {
        Index j = clique[lb];
        if (j == anchor || placed[j]) continue;
        double v = 0.0;
        if (kk_prev > 1e-14)
          v = full(i - 1, anchor - 1) * x(al, static_cast<Index>(lb)) / kk_prev;
        full(i - 1, j - 1) = v;
        full(j - 1, i - 1) = v;
      }
    }
    place_block(r);
    for (Index g : clique)
      if (!placed[g]) {
        placed[g] = true;
        prefix.push_back(g);
      }
  }
  return full;
}

}  // namespace cliquecop
