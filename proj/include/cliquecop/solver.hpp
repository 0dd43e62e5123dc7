#ifndef CLIQUECOP_SOLVER_HPP
#define CLIQUECOP_SOLVER_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

#include "cliquecop/decompose.hpp"

namespace cliquecop {

struct SolverConfig {
  double eps_feas = 1e-8;
  double eps_opt = 1e-7;
  double eps_cone = 1e-8;
  int max_iter = 20000;
  double unbounded_tol = 1e-7;
  unsigned seed = 0;
};

struct SolveStatus {
  enum class Kind { Optimal, Infeasible, Unbounded };
  Kind kind = Kind::Optimal;
  double value = 0.0;      // objective at the block when Optimal
  Eigen::MatrixXd block;   // optimal X_C when Optimal
  bool heuristic = false;  // value is a best-found upper bound, not certified

  bool optimal() const { return kind == Kind::Optimal; }
  static SolveStatus make_infeasible() { return {Kind::Infeasible, 0.0, {}, false}; }
  static SolveStatus make_unbounded() { return {Kind::Unbounded, 0.0, {}, false}; }
};

// Raised when an iterative kernel hits its iteration cap before meeting the
// residual targets; never silently reported as Optimal.
struct SolverConvergenceError : std::runtime_error {
  explicit SolverConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

// Nearest positive semidefinite matrix in Frobenius norm (eigenvalue clamp).
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m);

// Minimizes <Q0, X> over the DNN block with X_kk = anchor_value and the
// subproblem's homogeneous constraints.  Three phases: feasibility
// (least-squares violation over the cone), recession (trace-normalized
// X_kk = 0 problem, detecting rays with negative objective), and an
// operator-splitting optimization alternating an affine step with PSD and
// nonnegativity projections.
SolveStatus solve_block(const Subproblem& sub, const SolverConfig& cfg = {});

// Exact LP path for subproblems whose matrices are all diagonal.
SolveStatus solve_block_lp(const Subproblem& sub);

// True when the trace-normalized recession set
//   {X in DNN : X_kk = 0, constraints, trace X = 1}
// admits no point, i.e. the lambda = 0 feasible set is exactly {O}.
bool recession_set_is_origin(const Subproblem& sub, const SolverConfig& cfg = {});

// Membership in S+ + N (the dual of the DNN cone) via alternating
// projections between {Q - S : S psd} and the nonnegative matrices.
bool membership_psd_plus_nonneg(const Eigen::MatrixXd& q,
                                const SolverConfig& cfg = {});

// Homogeneous block with no anchor: minimal objective over
// {X in DNN : constraints, trace X = 1}, or Infeasible when that set is
// empty (the recession value oracle for components without node 1).
SolveStatus solve_recession(const Subproblem& sub, const SolverConfig& cfg = {});

}  // namespace cliquecop

#endif
