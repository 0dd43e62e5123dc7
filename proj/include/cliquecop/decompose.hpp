#ifndef CLIQUECOP_DECOMPOSE_HPP
#define CLIQUECOP_DECOMPOSE_HPP

#include <Eigen/Core>
#include <vector>

#include "cliquecop/ext_real.hpp"
#include "cliquecop/graph.hpp"
#include "cliquecop/problem.hpp"

namespace cliquecop {

struct LocalConstraint {
  int id;
  Eigen::MatrixXd matrix;  // |C| x |C| dense symmetric, clique-local order
};

// One clique's problem data: objective and constraints restricted to C_r,
// the anchor k_r shared with the parent, and the anchor level lambda.  The
// objective diagonal is extended-real: +inf entries stand for forced
// X_ii = 0 and are kept out of the finite matrix.
struct Subproblem {
  std::vector<Index> clique;  // sorted global indices
  Index anchor = 1;           // global index, member of clique
  double anchor_value = 1.0;  // lambda >= 0
  Eigen::MatrixXd objective;  // finite coefficients, local order
  std::vector<Index> inf_diagonal;  // local indices with +inf coefficient
  std::vector<LocalConstraint> eq;
  std::vector<LocalConstraint> ineq;

  Index size() const { return static_cast<Index>(clique.size()); }
  // Local position of a global index; -1 when absent.
  Index local(Index global) const;
  Index anchor_local() const { return local(anchor); }
  ExtReal objective_at(Index local_i, Index local_j) const;
  bool all_diagonal() const;
};

// Per-clique split of the objective with sum identity: each entry of Q0 is
// owned by exactly one clique (the lowest-numbered one containing it).
struct ObjectiveSplit {
  std::vector<SparseSymMatrix> per_clique;  // global indices, dim n

  double contribution(int r, const BlockSolution& block) const;
};

struct DecomposedProblem {
  CliqueTree tree;
  std::vector<Subproblem> subproblems;  // position r-1 holds clique r
  ObjectiveSplit split;
  CorrelativeAssignment assignment;

  int size() const { return static_cast<int>(subproblems.size()); }
};

// Principal submatrix of a sparse matrix on a sorted clique, as a dense
// local block.  When check_support is set, entries outside the clique are
// an error (constraint path); the objective path truncates.
Eigen::MatrixXd restrict_to_clique(const SparseSymMatrix& matrix,
                                   const std::vector<Index>& clique,
                                   bool check_support = false);

// Splits a COP along a clique tree: every constraint lands in its assigned
// clique restricted to C_r, and the objective is distributed entry-wise by
// the first-owning-clique rule.
DecomposedProblem decompose(const ConicProblem& problem, const CliqueTree& tree,
                            const CorrelativeAssignment& assignment);

struct GluedSolution {
  Eigen::VectorXd x;  // length n, nonnegative
  Eigen::MatrixXd rank_one() const { return x * x.transpose(); }
};

// Reassembles a global nonnegative rank-1 solution from per-clique rank-1
// blocks, filling C_1 first and then C_r \ {k_r} along the tree.
GluedSolution glue_gamma_solution(const std::vector<BlockSolution>& blocks,
                                  const CliqueTree& tree, Index n);

// DNN completion along the tree: every unspecified entry between C_r and
// the completed prefix is routed through the separator k_r as
// X_ij = X_ik X_kj / X_kk, with zero fill when X_kk = 0.
Eigen::MatrixXd complete_dnn(const std::vector<BlockSolution>& blocks,
                             const CliqueTree& tree, Index n);

}  // namespace cliquecop

#endif
