#ifndef CLIQUECOP_CLIQUE_SOLVER_HPP
#define CLIQUECOP_CLIQUE_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "cliquecop/gamma.hpp"
#include "cliquecop/solver.hpp"

namespace cliquecop {

// Per-clique outcome of the leaf-to-root pass: the lambda = 1 optimum of
// the subproblem and the anchor coefficient handed to the parent.
struct BackwardRecord {
  int clique_index = 0;            // r >= 2 within its tree
  ExtReal eta_tilde;               // inf of G_r at lambda = 1; +inf infeasible
  Eigen::MatrixXd block_template;  // X~ at lambda = 1; zero when infeasible
  ExtReal updated_anchor_coeff;    // parent coefficient after the update
  bool unbounded_ray = false;      // subproblem value -inf at lambda = 1
  bool heuristic = false;
};

enum class GlobalStatus { Optimal, Infeasible, Unbounded };

struct BackwardResult {
  std::vector<BackwardRecord> records;  // r = 2..ell, ascending clique index
  Subproblem root;                      // P1 data after all updates
  bool root_anchor_infinite = false;    // +inf landed on the root anchor
  bool unbounded_seen = false;
  bool heuristic = false;
};

struct SolveReport {
  GlobalStatus status = GlobalStatus::Optimal;
  double value = 0.0;  // +inf when infeasible, -inf when unbounded
  std::vector<BlockSolution> blocks;
  std::vector<BackwardRecord> per_clique;
  std::optional<Eigen::MatrixXd> completed_matrix;  // DNN completion
  std::optional<Eigen::VectorXd> glued_vector;      // Gamma rank-1 factor
  bool heuristic = false;
};

// One connected component of the effective sparsity graph with its clique
// tree and decomposed data.
struct ComponentPlan {
  std::vector<Index> nodes;
  bool contains_root = false;  // node 1 lives here
  bool extended = false;       // smallest block-clique extension applied
  CliqueTree tree;
  DecomposedProblem dp;
};

struct DecompositionPlan {
  SparsityGraph aggregated;  // minimal pattern of the data
  SparsityGraph effective;   // pattern actually decomposed
  bool from_pattern = false;
  std::vector<ComponentPlan> components;  // component with node 1 first
};

// Builds the full decomposition: effective graph (explicit pattern where
// given, else the aggregated one), per-component block-clique trees (with
// the smallest extension when allowed) and the correlative assignment.
DecompositionPlan plan_decomposition(
    const ConicProblem& problem,
    const std::optional<SparsityGraph>& pattern = std::nullopt,
    bool auto_extend = false);

// Leaf-to-root pass over one tree: solves P~_r(K, 1) for r = ell..2 with
// the dispatch LP-if-diagonal / cone solver, folds each optimum into the
// parent anchor coefficient, and converts +inf coefficients into X_ii = 0
// pins.  Infeasible subproblems are probed for negative recession rays so
// unboundedness hiding under a zero anchor is still surfaced.
BackwardResult backward_pass(const DecomposedProblem& dp, ConeKind cone,
                             const SolverConfig& cfg = {},
                             bool parallel = false);

// Root-to-leaf recovery X*_{C_r} = X*_{k_r k_r} X~_{C_r} with the
// 0 * inf = 0 convention; every reported block is feasible for its
// Psi_r(K, X*_{k_r k_r}).
SolveReport forward_pass(const DecomposedProblem& dp,
                         const BackwardResult& backward,
                         const SolveStatus& root_status);

struct SolveOptions {
  bool parallel = false;
  bool complete = false;     // attach DNN completion / Gamma glue
  bool auto_extend = false;  // allow smallest block-clique extension
};

// End to end: plan, backward, root solve, forward, optional completion.
// Components without node 1 are homogeneous; their trace-normalized
// recession value decides between a zero contribution and global
// unboundedness.
SolveReport solve(const ConicProblem& problem, ConeKind cone,
                  const SolverConfig& cfg = {}, const SolveOptions& options = {},
                  const std::optional<SparsityGraph>& pattern = std::nullopt);

// Equivalence certificate state for one clique.
struct CliqueCertificate {
  int clique_index = 0;
  std::vector<Index> clique;
  bool small_blocks = false;      // (i) pattern coverable, cliques <= 4
  bool nonconvex_exact = false;   // (ii) eq-only, dual-cone data, Psi(0)={O}
  bool convex_exact = false;      // (iv) objective psd off anchor, psd data
  bool diagonal = false;          // (v) all local data diagonal
  bool both() const { return small_blocks && nonconvex_exact; }  // (iii)
  std::vector<std::string> notes;

  bool gamma_cpp() const { return nonconvex_exact || convex_exact || diagonal; }
  bool cpp_dnn() const { return small_blocks || convex_exact || diagonal; }
};

enum class CertVerdict { GAMMA_EQ_CPP_EQ_DNN, CPP_EQ_DNN, UNCERTIFIED };
std::string verdict_name(CertVerdict v);

struct Certificate {
  std::vector<CliqueCertificate> cliques;
  CertVerdict overall = CertVerdict::UNCERTIFIED;
  bool used_records = false;
};

// Evaluates the per-clique equivalence conditions for one decomposed tree.
// With backward records, condition (iv) checks the exactly updated
// objective; without, it falls back to the conservative pre-pass test
// (original objective psd off anchor and descendant blocks entrywise
// nonnegative).
Certificate certify(const DecomposedProblem& dp,
                    const std::optional<std::vector<BackwardRecord>>& records =
                        std::nullopt,
                    const SolverConfig& cfg = {});

// Certifies every component of a plan and merges to the weakest verdict.
Certificate certify_plan(const DecompositionPlan& plan, bool with_records,
                         const SolverConfig& cfg = {});

}  // namespace cliquecop

#endif
