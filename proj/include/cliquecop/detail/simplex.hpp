#ifndef CLIQUECOP_DETAIL_SIMPLEX_HPP
#define CLIQUECOP_DETAIL_SIMPLEX_HPP

#include <Eigen/Core>

namespace cliquecop::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status;
  Eigen::VectorXd x;  // primal point when Optimal
  double value = 0.0;
};

// Dense two-phase primal simplex with Bland's rule for
//   min c.x  s.t.  A x = b, x >= 0.
// Exact at desk scale; pivots guarded by a fixed tolerance.
LpResult simplex_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c);

// Feasibility of {x >= 0 : A x = b}.
bool lp_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace cliquecop::detail

#endif
