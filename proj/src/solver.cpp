#include "cliquecop/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "cliquecop/detail/simplex.hpp"
#include "cliquecop/gamma.hpp"

namespace cliquecop {

namespace {

int svec_dim(int n) { return n * (n + 1) / 2; }

const double kSqrt2 = std::sqrt(2.0);

// Column-stacked upper triangle with off-diagonal scaling so that
// svec(A).svec(B) = <A, B>.
Eigen::VectorXd svec(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      v(k++) = (i == j) ? a(i, j) : kSqrt2 * a(i, j);
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd a(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      double x = (i == j) ? v(k) : v(k) / kSqrt2;
      a(i, j) = x;
      a(j, i) = x;
      ++k;
    }
  return a;
}

// One affine-plus-cones program for the ADMM kernel.  The unknown is
// u = svec(X) ++ extras; X is constrained to PSD and entrywise nonneg,
// extras (slacks and violation bounds) to >= 0.
struct ConicProgram {
  int n = 0;       // matrix dimension
  int n_extra = 0;  // nonnegative scalars appended to u
  Eigen::VectorXd cost;    // linear term over u
  Eigen::MatrixXd hard_a;  // hard rows: hard_a u = hard_b
  Eigen::VectorXd hard_b;

  int dim() const { return svec_dim(n) + n_extra; }
};

struct AdmmOutput {
  Eigen::VectorXd u;
  int iters = 0;
};

// Optional external early-exit test on the affine-exact iterate; arguments
// are the iterate and the scale-normalized primal/dual residuals.
using EarlyStop = std::function<bool(const Eigen::VectorXd&, double, double)>;

// Consensus ADMM with over-relaxation: minimize cost.u subject to
// hard_a u = hard_b, u = y (PSD side), u = z (nonnegative side).  The
// affine step is a single equality-constrained least-squares solve with a
// factorization cached across iterations.
AdmmOutput admm_solve(const ConicProgram& prog_in, const SolverConfig& cfg,
                      double tol, const char* phase,
                      const EarlyStop& early_stop = {}) {
  // Objective scaling: the cone geometry is scale-free, so a unit-norm cost
  // keeps the dual magnitudes comparable across instances.
  ConicProgram prog = prog_in;
  double cost_norm = prog.cost.norm();
  if (cost_norm > 1.0) prog.cost /= cost_norm;
  const int d = svec_dim(prog.n);
  const int dim = prog.dim();

  // Drop linearly dependent hard rows; all-homogeneous duplicates are
  // consistent so this is exact.
  Eigen::MatrixXd f = prog.hard_a;
  Eigen::VectorXd fb = prog.hard_b;
  if (f.rows() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(f.transpose());
    qr.setThreshold(1e-12);
    const int rank = static_cast<int>(qr.rank());
    if (rank < f.rows()) {
      Eigen::MatrixXd f2(rank, dim);
      Eigen::VectorXd fb2(rank);
      for (int r = 0; r < rank; ++r) {
        int src = static_cast<int>(qr.colsPermutation().indices()(r));
        f2.row(r) = f.row(src);
        fb2(r) = fb(src);
      }
      f = std::move(f2);
      fb = std::move(fb2);
    }
  }
  const int m = static_cast<int>(f.rows());

  double rho = 1.0;
  Eigen::MatrixXd minv_ft;  // (2 rho)^-1 F^T
  Eigen::LLT<Eigen::MatrixXd> s_llt;
  auto factor = [&]() {
    if (m == 0) return;
    minv_ft = f.transpose() / (2.0 * rho);
    Eigen::MatrixXd s = f * minv_ft;
    s.diagonal().array() += 1e-13 * (1.0 + s.trace() / std::max(1, m));
    s_llt.compute(s);
  };
  factor();

  auto solve_affine = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd minv_w = w / (2.0 * rho);
    if (m == 0) return minv_w;
    Eigen::VectorXd nu = s_llt.solve(f * minv_w - fb);
    return (minv_w - minv_ft * nu).eval();
  };

  const double relax = 1.6;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd y = u, z = u, du1 = u, du2 = u;

  double r_prim = 0.0, r_dual = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    Eigen::VectorXd w = rho * (y - du1 + z - du2) - prog.cost;
    u = solve_affine(w);

    Eigen::VectorXd y_old = y, z_old = z;
    Eigen::VectorXd hat1 = relax * u + (1.0 - relax) * y_old + du1;
    y.head(d) = svec(project_psd(smat(hat1.head(d), prog.n)));
    y.tail(prog.n_extra) = hat1.tail(prog.n_extra);
    du1 = hat1 - y;
    Eigen::VectorXd hat2 = relax * u + (1.0 - relax) * z_old + du2;
    z = hat2.cwiseMax(0.0);
    du2 = hat2 - z;

    r_prim = std::max((u - y).norm(), (u - z).norm());
    r_dual = rho * std::max((y - y_old).norm(), (z - z_old).norm());
    double scale = 1.0 + std::max({u.norm(), y.norm(), z.norm()});
#ifdef CLIQUECOP_ADMM_TRACE
    if (it % 1000 == 0 || it < 5)
      fprintf(stderr, "[admm %s] it=%d rho=%g rp=%.3e rd=%.3e scale=%g\n",
              phase, it, rho, r_prim, r_dual, scale);
#endif
    if (r_prim <= tol * scale && r_dual <= tol * scale) return {u, it};
    if (early_stop && it % 50 == 0 &&
        early_stop(u, r_prim / scale, r_dual / scale))
      return {u, it};

    double res = std::max(r_prim, r_dual) / scale;
    if (it % 100 == 0 && res > 10.0 * tol) {
      // Residual balancing keeps the two residuals within a decade; left
      // alone near the fixed point where the ratio is numeric noise.
      if (r_prim > 10.0 * r_dual && rho < 1e4) {
        rho *= 2.0;
        du1 /= 2.0;
        du2 /= 2.0;
        factor();
      } else if (r_dual > 10.0 * r_prim && rho > 1e-4) {
        rho /= 2.0;
        du1 *= 2.0;
        du2 *= 2.0;
        factor();
      }
    }
  }
  throw SolverConvergenceError(
      std::string("solve_block: ") + phase + " phase did not converge (" +
      std::to_string(cfg.max_iter) + " iterations, primal " +
      std::to_string(r_prim) + ", dual " + std::to_string(r_dual) + ")");
}

// Hard-row builder over u = svec(X) ++ extras.
struct RowBuilder {
  int n;
  int dim;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;

  RowBuilder(int n_, int dim_) : n(n_), dim(dim_) {}

  Eigen::VectorXd matrix_row(const Eigen::MatrixXd& q) const {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
    row.head(svec_dim(n)) = svec(q);
    return row;
  }
  void add(const Eigen::VectorXd& row, double b) {
    rows.push_back(row);
    rhs.push_back(b);
  }
  void add_diag(int local_i, double b) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e(local_i, local_i) = 1.0;
    add(matrix_row(e), b);
  }
  void add_trace(double b) {
    add(matrix_row(Eigen::MatrixXd::Identity(n, n)), b);
  }
  void pack(ConicProgram& prog) const {
    prog.hard_a = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), dim);
    prog.hard_b = Eigen::VectorXd::Zero(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      // Unit row norms keep the splitting well conditioned across data of
      // mixed magnitudes.
      double nrm = rows[i].norm();
      double s = nrm > 1e-300 ? 1.0 / nrm : 1.0;
      prog.hard_a.row(static_cast<int>(i)) = s * rows[i];
      prog.hard_b(static_cast<int>(i)) = s * rhs[i];
    }
  }
};

double constraint_violation(const Subproblem& sub, const Eigen::MatrixXd& x) {
  double v = 0.0;
  for (const auto& c : sub.eq)
    v = std::max(v, std::abs((c.matrix.array() * x.array()).sum()));
  for (const auto& c : sub.ineq)
    v = std::max(v, (c.matrix.array() * x.array()).sum());
  return v;
}

struct PreparedSub {
  Subproblem sub;         // with inf diagonals stripped into pins
  std::vector<int> pins;  // local indices forced to zero
  bool infeasible = false;
};

// Converts +inf diagonal coefficients into X_ii = 0 pins; an infinite
// anchor coefficient with lambda > 0 is an immediate infeasibility.
PreparedSub prepare(const Subproblem& sub) {
  PreparedSub out;
  out.sub = sub;
  out.sub.inf_diagonal.clear();
  for (Index li : sub.inf_diagonal) {
    if (li == sub.anchor_local() && sub.anchor_value > 0.0) {
      out.infeasible = true;
      return out;
    }
    out.pins.push_back(li);
  }
  return out;
}

// Diagonal zeros forced by the constraint structure, propagated to a fixed
// point.  For psd data, <Q, X> = 0 gives X v = 0 per eigenvector v; if the
// unpinned part of v is sign-constant, X >= 0 entrywise forces every column
// in its support to vanish.  Nonnegative data pins its positive diagonal
// entries directly.  This settles the Psi(K, 0) = {O} structure of the
// worked instances without touching the iterative solver.
std::vector<int> forced_zero_cascade(const Subproblem& sub,
                                     std::vector<int> pins) {
  const int n = sub.size();
  std::vector<bool> pinned(static_cast<std::size_t>(n), false);
  for (int p : pins) pinned[static_cast<std::size_t>(p)] = true;

  struct PsdRow {
    Eigen::VectorXd v;
  };
  std::vector<PsdRow> rows;
  auto collect = [&](const Eigen::MatrixXd& q, bool equality) {
    double scale = 1.0 + q.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    if (eig.eigenvalues()(0) >= -1e-11 * scale) {
      for (int e = 0; e < n; ++e)
        if (eig.eigenvalues()(e) > 1e-11 * scale)
          rows.push_back({eig.eigenvectors().col(e)});
      return;
    }
    if (equality && q.minCoeff() >= -1e-11 * scale) {
      for (int i = 0; i < n; ++i)
        if (q(i, i) > 1e-11 * scale) pinned[static_cast<std::size_t>(i)] = true;
    }
  };
  for (const auto& c : sub.eq) collect(c.matrix, true);
  for (const auto& c : sub.ineq) collect(c.matrix, false);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& row : rows) {
      int pos = 0, neg = 0;
      for (int i = 0; i < n; ++i) {
        if (pinned[static_cast<std::size_t>(i)]) continue;
        if (row.v(i) > 1e-10) ++pos;
        if (row.v(i) < -1e-10) ++neg;
      }
      if (pos + neg == 0 || (pos > 0 && neg > 0)) continue;
      for (int i = 0; i < n; ++i) {
        if (pinned[static_cast<std::size_t>(i)]) continue;
        if (std::abs(row.v(i)) > 1e-10) {
          pinned[static_cast<std::size_t>(i)] = true;
          changed = true;
        }
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (pinned[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

// A pinned diagonal X_ii = 0 forces the whole row and column to zero on
// the PSD cone, so pinned indices are eliminated from the block outright.
// Keeping them as hard rows would leave the affine set touching the cone
// tangentially and stall the splitting iteration.
struct ReducedSub {
  Subproblem sub;         // data restricted to the kept indices
  std::vector<int> keep;  // kept original local indices
  int orig_n = 0;

  Eigen::MatrixXd expand(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(orig_n, orig_n);
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = 0; b < keep.size(); ++b)
        out(keep[a], keep[b]) = x(static_cast<Index>(a), static_cast<Index>(b));
    return out;
  }
  // Reduced-local position of an original local index, or -1 if dropped.
  int reduced_pos(int orig_local) const {
    auto it = std::find(keep.begin(), keep.end(), orig_local);
    return it == keep.end() ? -1 : static_cast<int>(it - keep.begin());
  }
};

ReducedSub reduce_block(const Subproblem& sub, std::vector<int> drop) {
  std::sort(drop.begin(), drop.end());
  drop.erase(std::unique(drop.begin(), drop.end()), drop.end());
  ReducedSub out;
  out.orig_n = sub.size();
  for (int i = 0; i < sub.size(); ++i)
    if (!std::binary_search(drop.begin(), drop.end(), i)) out.keep.push_back(i);
  const int m = static_cast<int>(out.keep.size());
  auto restrict = [&](const Eigen::MatrixXd& q) {
    Eigen::MatrixXd r(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) r(a, b) = q(out.keep[a], out.keep[b]);
    return r;
  };
  Subproblem red;
  for (int a : out.keep)
    red.clique.push_back(sub.clique[static_cast<std::size_t>(a)]);
  red.anchor = red.clique.empty() ? sub.anchor : red.clique.front();
  int ak = out.reduced_pos(static_cast<int>(sub.anchor_local()));
  if (ak >= 0) red.anchor = red.clique[static_cast<std::size_t>(ak)];
  red.anchor_value = sub.anchor_value;
  red.objective = restrict(sub.objective);
  for (const auto& c : sub.eq) red.eq.push_back({c.id, restrict(c.matrix)});
  for (const auto& c : sub.ineq) red.ineq.push_back({c.id, restrict(c.matrix)});
  out.sub = std::move(red);
  return out;
}

// Minimal L-inf constraint violation over the DNN block intersected with
// the given normalization rows: minimize t subject to
//   <Qp, X> within [-t, t]   (equalities)
//   <Qp, X> <= t             (inequalities)
// written with nonnegative slacks.  Linear objective, always attained.
struct FeasibilityProbe {
  double min_violation;
  Eigen::MatrixXd x;
};

// Early exit for optimize phases: explicit cone quality plus an objective
// settled over several consecutive checks; on degenerate optimal faces the
// iterate keeps wandering long after the value is final.
struct OptimizeStopState {
  double last_value = std::numeric_limits<double>::infinity();
  int stable_checks = 0;
};

// Per-constraint violation functionals, chosen facially: a psd equality is
// measured through its |(X v)_i| <= t rows rather than the quadratic scalar
// (equivalent over psd X, and the affine set then meets the cone through a
// face instead of tangentially).
struct ViolationRows {
  std::vector<Eigen::VectorXd> functionals;  // two-sided |f.u| <= t
  std::vector<Eigen::VectorXd> one_sided;    // f.u <= t
};

ViolationRows violation_functionals(const Subproblem& sub, int dim) {
  const int n = sub.size();
  RowBuilder rb(n, dim);
  ViolationRows out;
  auto classify_eq = [&](const Eigen::MatrixXd& q) {
    double scale = 1.0 + q.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    if (eig.eigenvalues()(0) >= -1e-11 * scale) {
      for (int e = 0; e < n; ++e) {
        if (eig.eigenvalues()(e) <= 1e-11 * scale) continue;
        Eigen::VectorXd v = eig.eigenvectors().col(e);
        for (int i = 0; i < n; ++i) {
          Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
          m.row(i) += 0.5 * v.transpose();
          m.col(i) += 0.5 * v;
          out.functionals.push_back(rb.matrix_row(m));
        }
      }
      return;
    }
    if (q.minCoeff() >= -1e-11 * scale) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          if (q(i, j) <= 1e-11 * scale) continue;
          Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
          m(i, j) = m(j, i) = 1.0;
          // the entry itself lives on the nonnegative side, one-sided t
          out.one_sided.push_back(rb.matrix_row(m));
        }
      return;
    }
    out.functionals.push_back(rb.matrix_row(q));
  };
  for (const auto& c : sub.eq) classify_eq(c.matrix);
  for (const auto& c : sub.ineq) {
    double scale = 1.0 + c.matrix.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.matrix);
    if (eig.eigenvalues()(0) >= -1e-11 * scale) {
      classify_eq(c.matrix);  // psd inequality collapses to equality
      continue;
    }
    if (eig.eigenvalues()(n - 1) <= 1e-11 * scale) continue;  // nsd: vacuous
    out.one_sided.push_back(rb.matrix_row(c.matrix));
  }
  return out;
}

FeasibilityProbe min_violation_probe(
    const Subproblem& sub,
    const std::vector<std::pair<int, double>>& normalization_diag,
    bool with_trace_one, const SolverConfig& cfg, double tol,
    const char* phase) {
  const int n = sub.size();
  const int d = svec_dim(n);

  // First pass to count functionals (they are dim-independent in the svec
  // part; extras live past d).
  ViolationRows probe_rows = violation_functionals(sub, d);
  const int m_two = static_cast<int>(probe_rows.functionals.size());
  const int m_one = static_cast<int>(probe_rows.one_sided.size());
  // extras: 2 slacks per two-sided row, 1 per one-sided row, then t.
  const int n_extra = 2 * m_two + m_one + 1;
  const int dim = d + n_extra;
  const int t_index = dim - 1;

  ConicProgram prog;
  prog.n = n;
  prog.n_extra = n_extra;
  prog.cost = Eigen::VectorXd::Zero(dim);
  prog.cost(t_index) = 1.0;

  RowBuilder rb(n, dim);
  for (const auto& [local_i, value] : normalization_diag)
    rb.add_diag(local_i, value);
  if (with_trace_one) rb.add_trace(1.0);
  int extra = d;
  auto widen = [dim](const Eigen::VectorXd& f) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
    r.head(f.size()) = f;
    return r;
  };
  for (const auto& f : probe_rows.functionals) {
    Eigen::VectorXd r1 = widen(f);  // f.u - t + s1 = 0
    r1(t_index) = -1.0;
    r1(extra++) = 1.0;
    rb.add(r1, 0.0);
    Eigen::VectorXd r2 = -widen(f);  // -f.u - t + s2 = 0
    r2(t_index) = -1.0;
    r2(extra++) = 1.0;
    rb.add(r2, 0.0);
  }
  for (const auto& f : probe_rows.one_sided) {
    Eigen::VectorXd r = widen(f);  // f.u - t + s = 0
    r(t_index) = -1.0;
    r(extra++) = 1.0;
    rb.add(r, 0.0);
  }
  rb.pack(prog);

  // The value t is what matters; stop once it is pinned near zero, or once
  // it has clearly settled at a level far above the decision threshold
  // (the iterate itself may keep wandering across a degenerate face).
  auto state = std::make_shared<OptimizeStopState>();
  auto stop = [t_index, &cfg, state](const Eigen::VectorXd& u, double rp,
                                     double /*rd*/) {
    double t_val = u(t_index);
    if (rp <= 1e-6 && t_val <= 0.02 * cfg.eps_feas) return true;
    bool stable = std::abs(t_val - state->last_value) <=
                  1e-4 * (1.0 + std::abs(t_val));
    state->last_value = t_val;
    state->stable_checks = stable ? state->stable_checks + 1 : 0;
    return rp <= 1e-4 && t_val >= 1e-4 && state->stable_checks >= 3;
  };
  auto res = admm_solve(prog, cfg, tol, phase, stop);
  FeasibilityProbe out;
  out.x = smat(res.u.head(d), n);
  // t is the violation estimate; the iterate's own residual is polluted by
  // its distance to the cone and must not overrule it.
  out.min_violation = std::max(0.0, res.u(t_index));
  return out;
}

EarlyStop optimize_early_stop(int n, int d, Eigen::VectorXd cost,
                              const SolverConfig& cfg, double tol,
                              std::shared_ptr<OptimizeStopState> state) {
  return [n, d, cost = std::move(cost), cfg, tol,
          state](const Eigen::VectorXd& u, double rp, double rd) {
    double gate = std::max(1e-6, 1e2 * tol);
    if (rp > gate || rd > gate) return false;
    Eigen::MatrixXd x = smat(u.head(d), n);
    double xscale = 1.0 + x.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    bool cone_ok = eig.eigenvalues()(0) >= -0.5 * cfg.eps_cone * xscale &&
                   x.minCoeff() >= -0.5 * cfg.eps_cone * xscale;
    int n_extra = static_cast<int>(u.size()) - d;
    if (n_extra > 0 &&
        u.tail(n_extra).minCoeff() < -0.5 * cfg.eps_feas * xscale)
      cone_ok = false;
    double value = cost.dot(u);
    bool stable = std::abs(value - state->last_value) <=
                  0.02 * cfg.eps_opt * (1.0 + std::abs(value));
    state->last_value = value;
    state->stable_checks = (stable && cone_ok) ? state->stable_checks + 1 : 0;
    return state->stable_checks >= 5;
  };
}

// Emits the hard rows of one constraint.  A psd matrix forces
// <Q, X> = 0 <=> X v = 0 for every eigenvector of a positive eigenvalue
// (on the psd side of X), and those linear rows keep the affine set inside
// the face of the cone instead of touching it tangentially, which is what
// makes the splitting iteration converge linearly on the A^T A encodings.
void add_constraint_rows(RowBuilder& rb, const Eigen::MatrixXd& q,
                         bool equality, int* extra) {
  const int n = static_cast<int>(q.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  double scale = 1.0 + q.norm();
  bool psd = eig.eigenvalues()(0) >= -1e-11 * scale;
  if (psd) {
    for (int e = 0; e < n; ++e) {
      if (eig.eigenvalues()(e) <= 1e-11 * scale) continue;
      Eigen::VectorXd v = eig.eigenvectors().col(e);
      for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        m.row(i) += 0.5 * v.transpose();
        m.col(i) += 0.5 * v;
        rb.add(rb.matrix_row(m), 0.0);  // (X v)_i = 0
      }
    }
    return;
  }
  // Entrywise-nonnegative data against X >= 0: every touched entry must
  // vanish individually (complementarity pins).
  if (equality && q.minCoeff() >= -1e-11 * scale) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        if (q(i, j) <= 1e-11 * scale) continue;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        m(i, j) = m(j, i) = 1.0;
        rb.add(rb.matrix_row(m), 0.0);
      }
    return;
  }
  Eigen::VectorXd r = rb.matrix_row(q);
  if (!equality) r((*extra)++) = 1.0;  // <Q,X> + s = 0, s >= 0
  rb.add(r, 0.0);
}

// Shared optimize phase: minimize <Q0, X> over the hard constraint rows.
AdmmOutput optimize_phase(const Subproblem& sub,
                          const std::vector<std::pair<int, double>>& norm_diag,
                          bool with_trace_one, const SolverConfig& cfg,
                          double tol, const char* phase) {
  const int n = sub.size();
  const int d = svec_dim(n);
  const int m_in = static_cast<int>(sub.ineq.size());
  const int dim = d + m_in;

  ConicProgram prog;
  prog.n = n;
  prog.n_extra = m_in;
  prog.cost = Eigen::VectorXd::Zero(dim);
  prog.cost.head(d) = svec(sub.objective);

  RowBuilder rb(n, dim);
  for (const auto& [local_i, value] : norm_diag) rb.add_diag(local_i, value);
  if (with_trace_one) rb.add_trace(1.0);
  int extra = d;
  for (const auto& c : sub.eq) add_constraint_rows(rb, c.matrix, true, &extra);
  for (const auto& c : sub.ineq) {
    // A psd inequality <Q,X> <= 0 over psd X also collapses to equality.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.matrix);
    if (eig.eigenvalues()(0) >= -1e-11 * (1.0 + c.matrix.norm()))
      add_constraint_rows(rb, c.matrix, true, &extra);
    else
      add_constraint_rows(rb, c.matrix, false, &extra);
  }
  rb.pack(prog);

  auto state = std::make_shared<OptimizeStopState>();
  return admm_solve(prog, cfg, tol, phase,
                    optimize_early_stop(n, d, prog.cost, cfg, tol, state));
}

}  // namespace

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("project_psd: matrix not square");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("project_psd: eigensolver failed");
  Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

SolveStatus solve_block(const Subproblem& sub_in, const SolverConfig& cfg) {
  auto prep = prepare(sub_in);
  if (prep.infeasible) return SolveStatus::make_infeasible();
  const Subproblem& sub = prep.sub;
  const int n = sub.size();
  const int k = sub.anchor_local();
  const double lambda = sub.anchor_value;
  const double tol = 0.1 * std::min({cfg.eps_opt, cfg.eps_cone, cfg.eps_feas});
  const double feas_gate = 100.0 * tol;

  // lambda = 0 pins the anchor row like any other zero diagonal, and the
  // constraint structure may force more diagonals to vanish.
  std::vector<int> pins = prep.pins;
  if (lambda == 0.0) pins.push_back(k);
  pins = forced_zero_cascade(sub, pins);
  if (lambda > 0.0 &&
      std::find(pins.begin(), pins.end(), k) != pins.end())
    return SolveStatus::make_infeasible();
  ReducedSub red = reduce_block(sub, pins);
  const int rk = red.reduced_pos(k);

  if (red.keep.empty()) {
    // Every index is pinned; X = O is the only candidate.
    SolveStatus out;
    out.kind = SolveStatus::Kind::Optimal;
    out.block = Eigen::MatrixXd::Zero(n, n);
    out.value = 0.0;
    return out;
  }

  std::vector<std::pair<int, double>> norm;
  if (rk >= 0) norm.push_back({rk, lambda});

  // Phase F: least max-violation over {X in DNN, X_kk = lambda}.  A rank-1
  // feasible point found by branch LPs settles the question outright
  // (Gamma sits inside DNN); the splitting probe is the general fallback.
  {
    Subproblem gprobe = sub;
    for (int p : pins) gprobe.inf_diagonal.push_back(static_cast<Index>(p));
    if (gamma_feasible(gprobe, cfg) != GammaFeasibility::Feasible) {
      auto probe =
          min_violation_probe(red.sub, norm, false, cfg, tol, "feasibility");
      if (probe.min_violation > cfg.eps_feas * (1.0 + probe.x.norm()) &&
          probe.min_violation > feas_gate)
        return SolveStatus::make_infeasible();
    }
  }

  // Phase R: recession directions (X_kk = 0, trace-normalized, anchor row
  // eliminated).  A feasible direction with negative objective makes the
  // block unbounded; homogeneity gives value 0 or -inf at lambda = 0.
  {
    std::vector<int> rec_pins = pins;
    rec_pins.push_back(k);
    rec_pins = forced_zero_cascade(sub, rec_pins);
    ReducedSub rec = reduce_block(sub, rec_pins);
    if (!rec.keep.empty()) {
      Subproblem gprobe = sub;
      for (int p : pins) gprobe.inf_diagonal.push_back(static_cast<Index>(p));
      bool ray_exists;
      if (gamma_recession_point(gprobe, cfg) == GammaFeasibility::Feasible) {
        ray_exists = true;
      } else {
        auto probe = min_violation_probe(rec.sub, {}, true, cfg, tol,
                                         "recession-feasibility");
        ray_exists =
            probe.min_violation <=
            std::max(cfg.eps_feas * (1.0 + probe.x.norm()), feas_gate);
      }
      if (ray_exists) {
        auto ray = optimize_phase(rec.sub, {}, true, cfg, tol, "recession");
        const int rn = static_cast<int>(rec.keep.size());
        double val = (rec.sub.objective.array() *
                      smat(ray.u.head(svec_dim(rn)), rn).array())
                         .sum();
        if (val < -cfg.unbounded_tol) return SolveStatus::make_unbounded();
      }
    }
  }

  // Phase O: minimize the objective over the feasible set.
  auto res = optimize_phase(red.sub, norm, false, cfg, tol, "optimize");
  const int rn = static_cast<int>(red.keep.size());
  SolveStatus out;
  out.kind = SolveStatus::Kind::Optimal;
  out.block = red.expand(smat(res.u.head(svec_dim(rn)), rn));
  out.value = (sub.objective.array() * out.block.array()).sum();
  return out;
}

SolveStatus solve_block_lp(const Subproblem& sub_in) {
  auto prep = prepare(sub_in);
  if (prep.infeasible) return SolveStatus::make_infeasible();
  const Subproblem& sub = prep.sub;
  if (!sub.all_diagonal())
    throw std::invalid_argument("solve_block_lp: matrices are not diagonal");
  const int n = sub.size();
  const int k = sub.anchor_local();
  const double lambda = sub.anchor_value;

  // Variables: X_ii for i != anchor, then one slack per inequality.
  std::vector<int> vars;
  for (int i = 0; i < n; ++i)
    if (i != k &&
        std::find(prep.pins.begin(), prep.pins.end(), i) == prep.pins.end())
      vars.push_back(i);
  const int nv = static_cast<int>(vars.size());
  const int ns = static_cast<int>(sub.ineq.size());
  const int m = static_cast<int>(sub.eq.size()) + ns;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, nv + ns);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  int row = 0;
  for (const auto& c : sub.eq) {
    for (int v = 0; v < nv; ++v) a(row, v) = c.matrix(vars[v], vars[v]);
    b(row) = -c.matrix(k, k) * lambda;
    ++row;
  }
  int s = 0;
  for (const auto& c : sub.ineq) {
    for (int v = 0; v < nv; ++v) a(row, v) = c.matrix(vars[v], vars[v]);
    a(row, nv + s) = 1.0;
    b(row) = -c.matrix(k, k) * lambda;
    ++row;
    ++s;
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nv + ns);
  for (int v = 0; v < nv; ++v) cost(v) = sub.objective(vars[v], vars[v]);

  auto lp = detail::simplex_solve(a, b, cost);
  if (lp.status == detail::LpStatus::Infeasible)
    return SolveStatus::make_infeasible();
  if (lp.status == detail::LpStatus::Unbounded)
    return SolveStatus::make_unbounded();

  SolveStatus out;
  out.kind = SolveStatus::Kind::Optimal;
  out.block = Eigen::MatrixXd::Zero(n, n);
  out.block(k, k) = lambda;
  for (int v = 0; v < nv; ++v) out.block(vars[v], vars[v]) = lp.x(v);
  out.value = lp.value + sub.objective(k, k) * lambda;
  return out;
}

bool recession_set_is_origin(const Subproblem& sub_in, const SolverConfig& cfg) {
  auto prep = prepare(sub_in);
  const Subproblem& sub = prep.sub;
  const double tol = 0.1 * std::min({cfg.eps_opt, cfg.eps_cone, cfg.eps_feas});
  std::vector<int> pins = prep.pins;
  pins.push_back(static_cast<int>(sub.anchor_local()));
  pins = forced_zero_cascade(sub, pins);
  ReducedSub red = reduce_block(sub, pins);
  if (red.keep.empty()) return true;
  Subproblem gprobe = sub;
  for (int p : prep.pins) gprobe.inf_diagonal.push_back(static_cast<Index>(p));
  if (gamma_recession_point(gprobe, cfg) == GammaFeasibility::Feasible)
    return false;
  auto probe =
      min_violation_probe(red.sub, {}, true, cfg, tol, "recession-probe");
  return probe.min_violation >
         std::max(cfg.eps_feas * (1.0 + probe.x.norm()), 100.0 * tol);
}

bool membership_psd_plus_nonneg(const Eigen::MatrixXd& q,
                                const SolverConfig& cfg) {
  if (q.rows() != q.cols())
    throw std::invalid_argument("membership_psd_plus_nonneg: not square");
  const double accept = cfg.eps_cone * (1.0 + q.norm());
  // Sufficient one-sided decompositions first: S = Q or N = Q.
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    if (eig.eigenvalues()(0) >= -accept) return true;
  }
  if (q.minCoeff() >= -accept) return true;
  // Alternating projections between {Q - S : S psd} and the nonnegative
  // matrices; the gap is monotone, so a stall above tolerance is a no.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  Eigen::MatrixXd nn = s;
  double dist = std::numeric_limits<double>::infinity();
  double window_best = dist;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    nn = (q - s).cwiseMax(0.0);
    s = project_psd(q - nn);
    dist = (q - nn - s).norm();
    if (dist <= 0.25 * accept) return true;
    if (it % 200 == 0) {
      if (window_best - dist <= 1e-4 * dist) break;
      window_best = dist;
    }
  }
  return dist <= accept;
}

SolveStatus solve_recession(const Subproblem& sub_in, const SolverConfig& cfg) {
  auto prep = prepare(sub_in);
  const Subproblem& sub = prep.sub;
  const int n = sub.size();
  const double tol = 0.1 * std::min({cfg.eps_opt, cfg.eps_cone, cfg.eps_feas});
  ReducedSub red = reduce_block(sub, forced_zero_cascade(sub, prep.pins));
  if (red.keep.empty()) return SolveStatus::make_infeasible();

  {
    auto probe = min_violation_probe(red.sub, {}, true, cfg, tol,
                                     "component-feasibility");
    if (probe.min_violation >
        std::max(cfg.eps_feas * (1.0 + probe.x.norm()), 100.0 * tol))
      return SolveStatus::make_infeasible();
  }
  auto res =
      optimize_phase(red.sub, {}, true, cfg, tol, "component-recession");
  const int rn = static_cast<int>(red.keep.size());
  SolveStatus out;
  out.kind = SolveStatus::Kind::Optimal;
  out.block = red.expand(smat(res.u.head(svec_dim(rn)), rn));
  out.value = (sub.objective.array() * out.block.array()).sum();
  return out;
}

}  // namespace cliquecop
