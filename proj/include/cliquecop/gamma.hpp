#ifndef CLIQUECOP_GAMMA_HPP
#define CLIQUECOP_GAMMA_HPP

#include "cliquecop/solver.hpp"

namespace cliquecop {

// Brute-force minimization of <Q0, x x^T> over x >= 0 with x_k^2 equal to
// the anchor value and the subproblem's quadratic constraints.
//
// Equality constraints factor into exact machinery when each matrix is
// either PSD (rows of A with Ax = 0) or entrywise nonnegative
// (complementarity pairs and pins); every complementarity pair branches
// into x_i = 0 / x_j = 0 and each branch's polytope is searched by
// enumerating active sets (vertices plus face-stationary points).  When a
// constraint escapes those classes, or a branch polytope is unbounded with
// flat directions, the result is a best-found upper bound from multi-start
// projected penalty descent and carries heuristic = true.
//
// Size guard: |C| <= 8.
SolveStatus gamma_oracle(const Subproblem& sub, const SolverConfig& cfg = {});

// Feasibility probe for Psi_r(Gamma, lambda): tri-state since the exact
// machinery does not cover every constraint class.  Works at any block size
// (branch feasibility is linear programming, not enumeration).
enum class GammaFeasibility { Feasible, Empty, Unknown };
GammaFeasibility gamma_feasible(const Subproblem& sub,
                                const SolverConfig& cfg = {});

// Existence of a nonzero x >= 0 with x_k = 0 satisfying the constraints
// (a rank-1 recession point, probed per complementarity branch with a
// sum-normalized feasibility LP).
GammaFeasibility gamma_recession_point(const Subproblem& sub,
                                       const SolverConfig& cfg = {});

}  // namespace cliquecop

#endif
