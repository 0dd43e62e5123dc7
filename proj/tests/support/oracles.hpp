#ifndef CLIQUECOP_TESTS_ORACLES_HPP
#define CLIQUECOP_TESTS_ORACLES_HPP

#include <optional>
#include <vector>

#include "cliquecop/clique_solver.hpp"

namespace cctest {

using cliquecop::ConicProblem;
using cliquecop::Index;
using cliquecop::SparseSymMatrix;
using cliquecop::SparsityGraph;

// Dense double-loop inner product oracle for <Q, X>.
double dense_inner(const SparseSymMatrix& q, const SparseSymMatrix& x);

// Nearest-PSD projection recomputed with long-double Jacobi rotations.
Eigen::MatrixXd project_psd_jacobi(const Eigen::MatrixXd& m);

// Chordality by brute-force chordless-cycle search (n <= 9).
bool chordal_by_cycle_enumeration(const SparsityGraph& g);

// Maximal cliques by subset enumeration (n <= 16).
std::vector<std::vector<Index>> cliques_by_enumeration(const SparsityGraph& g);

// Cut vertices by vertex-removal connectivity checks.
std::vector<Index> cut_nodes_by_removal(const SparsityGraph& g);

// Reference solve of the undecomposed COP over one DNN cone on S^n.
cliquecop::SolveStatus full_dnn_reference(const ConicProblem& problem,
                                          const cliquecop::SolverConfig& cfg);

// Joint value of P_r: cliques 1..r of the tree solved as one full-matrix
// DNN problem over their union, with the objective diagonal updated by the
// records of the already-eliminated cliques q > r.
cliquecop::SolveStatus joint_pr_value(
    const ConicProblem& problem, const cliquecop::DecomposedProblem& dp,
    const std::vector<cliquecop::BackwardRecord>& records, int r,
    const cliquecop::SolverConfig& cfg);

}  // namespace cctest

#endif
