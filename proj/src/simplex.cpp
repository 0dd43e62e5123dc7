#include "cliquecop/detail/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cliquecop::detail {

namespace {

constexpr double kPivTol = 1e-11;

// Tableau simplex over the working matrix [A | b] with basis tracking.
// Returns false when the phase objective is unbounded.
bool run_simplex(Eigen::MatrixXd& tab, std::vector<int>& basis,
                 Eigen::VectorXd cost, double& objective) {
  const int m = static_cast<int>(tab.rows());
  const int ncols = static_cast<int>(tab.cols()) - 1;
  // Reduced costs maintained implicitly: z_j = c_j - c_B . (B^-1 A_j).
  for (;;) {
    Eigen::VectorXd cb(m);
    for (int r = 0; r < m; ++r) cb(r) = cost(basis[r]);
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      double red = cost(j) - cb.dot(tab.col(j));
      if (red < -kPivTol) {  // Bland: first improving column
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      objective = cb.dot(tab.col(ncols));
      return true;
    }
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      double piv = tab(r, enter);
      if (piv > kPivTol) {
        double ratio = tab(r, ncols) / piv;
        if (ratio < best_ratio - kPivTol ||
            (ratio < best_ratio + kPivTol &&
             (leave < 0 || basis[r] < basis[leave]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
    }
    if (leave < 0) return false;  // unbounded direction
    double piv = tab(leave, enter);
    tab.row(leave) /= piv;
    for (int r = 0; r < m; ++r) {
      if (r == leave) continue;
      double f = tab(r, enter);
      if (f != 0.0) tab.row(r) -= f * tab.row(leave);
    }
    basis[leave] = enter;
  }
}

}  // namespace

LpResult simplex_solve(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in,
                       const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a_in.rows());
  const int n = static_cast<int>(a_in.cols());
  if (b_in.size() != m || c.size() != n)
    throw std::invalid_argument("simplex_solve: shape mismatch");
  if (m == 0) {
    // No constraints: min over x >= 0 of c.x.
    LpResult res;
    if ((c.array() < -kPivTol).any()) {
      res.status = LpStatus::Unbounded;
      return res;
    }
    res.status = LpStatus::Optimal;
    res.x = Eigen::VectorXd::Zero(n);
    res.value = 0.0;
    return res;
  }

  Eigen::MatrixXd a = a_in;
  Eigen::VectorXd b = b_in;
  for (int r = 0; r < m; ++r)
    if (b(r) < 0) {
      a.row(r) = -a.row(r);
      b(r) = -b(r);
    }

  // Phase 1: artificials n..n+m-1.
  Eigen::MatrixXd tab(m, n + m + 1);
  tab.leftCols(n) = a;
  tab.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  tab.col(n + m) = b;
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + m);
  c1.tail(m).setOnes();
  double phase1 = 0.0;
  run_simplex(tab, basis, c1, phase1);  // phase-1 objective is bounded below
  LpResult res;
  if (phase1 > 1e-8) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  // Pivot remaining artificials out of the basis where possible; rows with
  // no real pivot are redundant and dropped.
  std::vector<int> keep_rows;
  for (int r = 0; r < m; ++r) {
    if (basis[static_cast<std::size_t>(r)] < n) {
      keep_rows.push_back(r);
      continue;
    }
    int enter = -1;
    for (int j = 0; j < n; ++j)
      if (std::abs(tab(r, j)) > 1e-9) {
        enter = j;
        break;
      }
    if (enter < 0) continue;  // redundant row
    double piv = tab(r, enter);
    tab.row(r) /= piv;
    for (int rr = 0; rr < m; ++rr) {
      if (rr == r) continue;
      double f = tab(rr, enter);
      if (f != 0.0) tab.row(rr) -= f * tab.row(r);
    }
    basis[static_cast<std::size_t>(r)] = enter;
    keep_rows.push_back(r);
  }

  const int m2 = static_cast<int>(keep_rows.size());
  Eigen::MatrixXd tab2(m2, n + 1);
  std::vector<int> basis2(static_cast<std::size_t>(m2));
  for (int r = 0; r < m2; ++r) {
    tab2.row(r).head(n) = tab.row(keep_rows[static_cast<std::size_t>(r)]).head(n);
    tab2(r, n) = tab(keep_rows[static_cast<std::size_t>(r)], n + m);
    basis2[static_cast<std::size_t>(r)] =
        basis[static_cast<std::size_t>(keep_rows[static_cast<std::size_t>(r)])];
  }

  double objective = 0.0;
  if (!run_simplex(tab2, basis2, c, objective)) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m2; ++r)
    res.x(basis2[static_cast<std::size_t>(r)]) = tab2(r, n);
  res.value = objective;
  return res;
}

bool lp_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a.cols());
  return simplex_solve(a, b, c).status != LpStatus::Infeasible;
}

}  // namespace cliquecop::detail
