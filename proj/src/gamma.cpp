#include "cliquecop/gamma.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cliquecop/detail/simplex.hpp"

namespace cliquecop {

namespace {

constexpr double kClassTol = 1e-10;
constexpr double kFaceTol = 1e-9;

struct Classified {
  Eigen::MatrixXd lin_rows;               // rows a with a.x = 0 (local)
  std::vector<std::pair<int, int>> pairs;  // complementarity x_i x_j = 0
  std::vector<int> pins;                   // forced x_i = 0
  std::vector<const LocalConstraint*> residual_eq;
  std::vector<const LocalConstraint*> residual_ineq;
  bool exact = true;
};

// Splits constraints into linear rows, complementarities and pins where the
// matrix class allows it; everything else stays quadratic.
Classified classify(const Subproblem& sub) {
  Classified out;
  const int n = sub.size();
  std::vector<Eigen::VectorXd> rows;
  auto handle_nonneg = [&](const Eigen::MatrixXd& q) {
    for (int i = 0; i < n; ++i) {
      if (q(i, i) > kClassTol) out.pins.push_back(i);
      for (int j = i + 1; j < n; ++j)
        if (q(i, j) > kClassTol) out.pairs.emplace_back(i, j);
    }
  };
  auto psd_rows = [&](const Eigen::MatrixXd& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    for (int i = 0; i < n; ++i) {
      double ev = eig.eigenvalues()(i);
      if (ev > kClassTol)
        rows.push_back(std::sqrt(ev) * eig.eigenvectors().col(i));
    }
  };
  auto min_eig = [](const Eigen::MatrixXd& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    return eig.eigenvalues()(0);
  };

  for (const auto& c : sub.eq) {
    double scale = 1.0 + c.matrix.norm();
    if (min_eig(c.matrix) >= -kClassTol * scale) {
      psd_rows(c.matrix);  // x'Qx = 0 with Q psd <=> Ax = 0
    } else if (c.matrix.minCoeff() >= -kClassTol * scale) {
      handle_nonneg(c.matrix);  // nonneg terms must each vanish
    } else {
      out.residual_eq.push_back(&c);
      out.exact = false;
    }
  }
  for (const auto& c : sub.ineq) {
    double scale = 1.0 + c.matrix.norm();
    if (min_eig(c.matrix) >= -kClassTol * scale) {
      psd_rows(c.matrix);  // x'Qx <= 0 with Q psd forces equality
    } else if (c.matrix.minCoeff() >= -kClassTol * scale) {
      handle_nonneg(c.matrix);
    } else if (min_eig(-c.matrix) >= -kClassTol * scale) {
      // NSD inequality holds everywhere.
    } else {
      out.residual_ineq.push_back(&c);
      out.exact = false;
    }
  }
  out.lin_rows = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.lin_rows.row(static_cast<int>(r)) = rows[r].transpose();
  std::sort(out.pins.begin(), out.pins.end());
  out.pins.erase(std::unique(out.pins.begin(), out.pins.end()),
                 out.pins.end());
  std::sort(out.pairs.begin(), out.pairs.end());
  out.pairs.erase(std::unique(out.pairs.begin(), out.pairs.end()),
                  out.pairs.end());
  return out;
}

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;  // full local vector
  bool found = false;

  void offer(double v, const Eigen::VectorXd& xc) {
    if (!found || v < value) {
      value = v;
      x = xc;
      found = true;
    }
  }
};

double quad_value(const Eigen::MatrixXd& q, const Eigen::VectorXd& x) {
  return x.dot(q * x);
}

// One complementarity branch: free variables F, fixed anchor, zeros.
struct Branch {
  std::vector<int> free_vars;  // local indices, sorted
  Eigen::MatrixXd a;           // lin_rows restricted to free vars
  Eigen::VectorXd b;           // rhs after moving the anchor term
};

// Enumerates active sets of the branch polytope {x_F >= 0 : A x_F = b} and
// offers vertices plus face-stationary points of the quadratic objective.
// Exactness rests on the Frank-Wolfe property: a quadratic bounded below on
// a polyhedron attains its minimum at a point whose face-reduced Hessian is
// positive semidefinite.
void enumerate_faces(const Branch& br, const Eigen::MatrixXd& q0,
                     const Eigen::VectorXd& fixed, Candidate& best) {
  const int nf = static_cast<int>(br.free_vars.size());
  const int n = static_cast<int>(fixed.size());
  Eigen::MatrixXd q_ff(nf, nf);
  Eigen::VectorXd q_fc = Eigen::VectorXd::Zero(nf);
  for (int a = 0; a < nf; ++a) {
    for (int b = 0; b < nf; ++b) q_ff(a, b) = q0(br.free_vars[a], br.free_vars[b]);
    for (int g = 0; g < n; ++g) q_fc(a) += q0(br.free_vars[a], g) * fixed(g);
  }
  const double const_term = fixed.dot(q0 * fixed);

  auto offer_point = [&](const Eigen::VectorXd& x_f) {
    if ((x_f.array() < -kFaceTol).any()) return;
    Eigen::VectorXd x = fixed;
    for (int a = 0; a < nf; ++a)
      x(br.free_vars[a]) += std::max(0.0, x_f(a));
    best.offer(quad_value(q0, x), x);
  };
  (void)const_term;

  for (unsigned mask = 0; mask < (1u << nf); ++mask) {
    std::vector<int> inside;
    for (int a = 0; a < nf; ++a)
      if (!((mask >> a) & 1u)) inside.push_back(a);
    const int nt = static_cast<int>(inside.size());
    if (nt == 0) {
      // Fully active face: the origin of the free block.
      if (br.a.rows() == 0 ||
          br.b.cwiseAbs().maxCoeff() <= kFaceTol * (1.0 + br.a.norm()))
        offer_point(Eigen::VectorXd::Zero(nf));
      continue;
    }
    Eigen::MatrixXd at(br.a.rows(), nt);
    for (int t = 0; t < nt; ++t) at.col(t) = br.a.col(inside[t]);

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(nt);
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Identity(nt, nt);
    if (at.rows() > 0) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(at);
      cod.setThreshold(1e-10);
      x0 = cod.solve(br.b);
      if ((at * x0 - br.b).norm() > kFaceTol * (1.0 + br.b.norm()))
        continue;  // face empty (inconsistent affine system)
      kernel = Eigen::FullPivLU<Eigen::MatrixXd>(at).kernel();
    }
    const bool trivial_kernel = kernel.cols() == 0 ||
                                (kernel.cols() == 1 && kernel.norm() < 1e-12);

    auto lift = [&](const Eigen::VectorXd& x_t) {
      Eigen::VectorXd x_f = Eigen::VectorXd::Zero(nf);
      for (int t = 0; t < nt; ++t) x_f(inside[t]) = x_t(t);
      return x_f;
    };

    if (trivial_kernel) {
      offer_point(lift(x0));  // vertex of the face lattice
      continue;
    }
    offer_point(lift(x0));  // keep the particular point as a fallback seed

    // Stationary points on the face's affine hull.
    Eigen::MatrixXd q_tt(nt, nt);
    Eigen::VectorXd q_tc(nt);
    for (int a = 0; a < nt; ++a) {
      q_tc(a) = q_fc(inside[a]);
      for (int b = 0; b < nt; ++b)
        q_tt(a, b) = q_ff(inside[a], inside[b]);
    }
    Eigen::MatrixXd h = kernel.transpose() * q_tt * kernel;
    Eigen::VectorXd g = kernel.transpose() * (q_tt * x0 + q_tc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> heig(h);
    if (heig.eigenvalues()(0) < -kFaceTol * (1.0 + h.norm())) continue;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> hcod(h);
    hcod.setThreshold(1e-10);
    Eigen::VectorXd t = hcod.solve(-g);
    if ((h * t + g).norm() > kFaceTol * (1.0 + g.norm())) continue;
    Eigen::VectorXd x_t = x0 + kernel * t;
    if ((x_t.array() >= -kFaceTol).all()) {
      offer_point(lift(x_t));
      continue;
    }
    // Singular PSD Hessian: the stationary set is affine and the value is
    // constant on it; look for a representative inside the face.
    Eigen::MatrixXd hker = Eigen::FullPivLU<Eigen::MatrixXd>(h).kernel();
    if (hker.cols() == 0 || hker.norm() < 1e-12) continue;
    // Solve x0 + K (t + W s) >= 0 as an LP feasibility problem with
    // s = s+ - s- and surplus v: K W (s+ - s-) - v = -(x0 + K t).
    const int ns = static_cast<int>(hker.cols());
    Eigen::MatrixXd kw = kernel * hker;
    Eigen::MatrixXd alp(nt, 2 * ns + nt);
    alp << kw, -kw, -Eigen::MatrixXd::Identity(nt, nt);
    Eigen::VectorXd blp = -(x0 + kernel * t);
    auto lp = detail::simplex_solve(alp, blp,
                                    Eigen::VectorXd::Zero(2 * ns + nt));
    if (lp.status != detail::LpStatus::Optimal) continue;
    Eigen::VectorXd s = lp.x.head(ns) - lp.x.segment(ns, ns);
    offer_point(lift(x0 + kernel * (t + hker * s)));
  }
}

// Nonzero recession directions {d >= 0 : A d = 0} of a branch polytope.
bool branch_polytope_bounded(const Branch& br) {
  const int nf = static_cast<int>(br.free_vars.size());
  if (nf == 0) return true;
  // max sum(d) over the recession cone capped by sum(d) + s = 1.
  Eigen::MatrixXd a(br.a.rows() + 1, nf + 1);
  a.setZero();
  a.topLeftCorner(br.a.rows(), nf) = br.a;
  a.row(br.a.rows()).head(nf).setOnes();
  a(br.a.rows(), nf) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(br.a.rows() + 1);
  b(br.a.rows()) = 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nf + 1);
  c.head(nf).setConstant(-1.0);
  auto lp = detail::simplex_solve(a, b, c);
  return lp.status == detail::LpStatus::Optimal && lp.value > -1e-9;
}

// Minimal d'Qd over normalized recession directions; used both to certify
// unboundedness and to rule it out.
double recession_quadratic_min(const Branch& br, const Eigen::MatrixXd& q0,
                               int n) {
  Branch rec = br;
  rec.b = Eigen::VectorXd::Zero(br.a.rows() + 1);
  rec.a.conservativeResize(br.a.rows() + 1, Eigen::NoChange);
  rec.a.row(br.a.rows()).setOnes();
  rec.b(br.a.rows()) = 1.0;
  Candidate best;
  enumerate_faces(rec, q0, Eigen::VectorXd::Zero(n), best);
  return best.found ? best.value : std::numeric_limits<double>::infinity();
}

struct PreparedGamma {
  Subproblem sub;
  std::vector<int> pins;
  bool infeasible = false;
};

PreparedGamma prepare_gamma(const Subproblem& sub) {
  PreparedGamma out;
  out.sub = sub;
  out.sub.inf_diagonal.clear();
  for (Index li : sub.inf_diagonal) {
    if (li == sub.anchor_local() && sub.anchor_value > 0.0) {
      out.infeasible = true;
      return out;
    }
    out.pins.push_back(static_cast<int>(li));
  }
  return out;
}

double violation(const Subproblem& sub, const Eigen::VectorXd& x) {
  double v = 0.0;
  for (const auto& c : sub.eq) v = std::max(v, std::abs(quad_value(c.matrix, x)));
  for (const auto& c : sub.ineq) v = std::max(v, quad_value(c.matrix, x));
  return v;
}

// Real roots of c3 t^3 + c2 t^2 + c1 t + c0 with a Newton polish.
void cubic_roots(double c3, double c2, double c1, double c0,
                 std::vector<double>& out) {
  out.clear();
  auto polish = [&](double t) {
    for (int it = 0; it < 8; ++it) {
      double f = ((c3 * t + c2) * t + c1) * t + c0;
      double df = (3 * c3 * t + 2 * c2) * t + c1;
      if (std::abs(df) < 1e-300) break;
      t -= f / df;
    }
    return t;
  };
  if (std::abs(c3) < 1e-12 * (std::abs(c2) + std::abs(c1) + std::abs(c0))) {
    if (std::abs(c2) < 1e-300) {
      if (std::abs(c1) > 1e-300) out.push_back(-c0 / c1);
      return;
    }
    double disc = c1 * c1 - 4 * c2 * c0;
    if (disc >= 0) {
      double s = std::sqrt(disc);
      out.push_back((-c1 + s) / (2 * c2));
      out.push_back((-c1 - s) / (2 * c2));
    }
    return;
  }
  // depressed cubic t = y - c2/(3 c3)
  double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  double p = b - a * a / 3.0;
  double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  double shift = -a / 3.0;
  double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0) {
    double s = std::sqrt(disc);
    double u = std::cbrt(-q / 2.0 + s), v = std::cbrt(-q / 2.0 - s);
    out.push_back(polish(u + v + shift));
  } else {
    double r = std::sqrt(std::max(0.0, -p * p * p / 27.0));
    double phi = std::acos(std::clamp(-q / (2.0 * std::max(r, 1e-300)), -1.0, 1.0));
    double m = 2.0 * std::sqrt(std::max(0.0, -p / 3.0));
    for (int j = 0; j < 3; ++j)
      out.push_back(polish(m * std::cos((phi + 2.0 * M_PI * j) / 3.0) + shift));
  }
}

// Multi-start penalty minimization with exact coordinate updates: along one
// coordinate every term is quadratic, so the penalized objective is a
// piecewise quartic whose minimum over [0, B] is found from cubic roots.
// Monotone by construction, no step-size tuning.
Candidate penalty_descent(const Subproblem& sub, const std::vector<int>& pins,
                          const SolverConfig& cfg) {
  const int n = sub.size();
  const int k = sub.anchor_local();
  const double xk = std::sqrt(std::max(0.0, sub.anchor_value));
  const double box = 1e3;
  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 10.0);

  std::vector<int> free_vars;
  for (int i = 0; i < n; ++i)
    if (i != k && std::find(pins.begin(), pins.end(), i) == pins.end())
      free_vars.push_back(i);

  // Penalty terms: psd data is penalized through its factored linear
  // residuals (a quartic penalty on (a.x)^2 flattens and stalls at
  // sqrt(1/mu) residuals); everything else keeps the quadratic-form value.
  struct PenaltyTerm {
    Eigen::MatrixXd q;   // quadratic form, or
    Eigen::VectorXd row;  // linear residual when linear = true
    bool linear = false;
    bool one_sided = false;
  };
  std::vector<PenaltyTerm> penalty_terms;
  auto add_term = [&](const Eigen::MatrixXd& q, bool one_sided) {
    double scale = 1.0 + q.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    if (eig.eigenvalues()(0) >= -kClassTol * scale) {
      for (int e = 0; e < n; ++e)
        if (eig.eigenvalues()(e) > kClassTol * scale) {
          PenaltyTerm t;
          t.linear = true;
          t.row = std::sqrt(eig.eigenvalues()(e)) * eig.eigenvectors().col(e);
          penalty_terms.push_back(std::move(t));
        }
      return;
    }
    if (one_sided && eig.eigenvalues()(n - 1) <= kClassTol * scale) return;
    PenaltyTerm t;
    t.q = q;
    t.one_sided = one_sided;
    penalty_terms.push_back(std::move(t));
  };
  for (const auto& c : sub.eq) add_term(c.matrix, false);
  for (const auto& c : sub.ineq) add_term(c.matrix, true);

  auto penalized = [&](const Eigen::VectorXd& x, double mu) {
    double f = quad_value(sub.objective, x);
    for (const auto& t : penalty_terms) {
      double g = t.linear ? t.row.dot(x) : quad_value(t.q, x);
      if (t.one_sided) g = std::max(0.0, g);
      f += mu * g * g;
    }
    return f;
  };

  // Exact minimization of the penalized objective along coordinate i.
  auto coordinate_min = [&](Eigen::VectorXd& x, int i, double mu) {
    struct Quad {
      double a, b, c;  // value along t: a t^2 + b t + c
      bool one_sided;
    };
    std::vector<Quad> terms;
    auto along = [&](const Eigen::MatrixXd& q, bool one_sided) {
      double a = q(i, i);
      double b = 2.0 * (q.row(i).dot(x) - q(i, i) * x(i));
      double full = quad_value(q, x);
      double c = full - a * x(i) * x(i) - b * x(i);
      terms.push_back({a, b, c, one_sided});
    };
    along(sub.objective, false);  // objective first, weight 1
    for (const auto& t : penalty_terms) {
      if (t.linear) {
        double b = t.row(i);
        double c = t.row.dot(x) - b * x(i);
        terms.push_back({0.0, b, c, false});
      } else {
        along(t.q, t.one_sided);
      }
    }

    // Piecewise-quartic segments split where one-sided terms cross zero.
    std::vector<double> bps{0.0, box};
    for (std::size_t c = 1; c < terms.size(); ++c) {
      if (!terms[c].one_sided) continue;
      const auto& q = terms[c];
      double disc = q.b * q.b - 4 * q.a * q.c;
      if (std::abs(q.a) > 1e-14 && disc >= 0) {
        double s = std::sqrt(disc);
        for (double r : {(-q.b + s) / (2 * q.a), (-q.b - s) / (2 * q.a)})
          if (r > 0 && r < box) bps.push_back(r);
      } else if (std::abs(q.a) <= 1e-14 && std::abs(q.b) > 1e-14) {
        double r = -q.c / q.b;
        if (r > 0 && r < box) bps.push_back(r);
      }
    }
    std::sort(bps.begin(), bps.end());

    auto eval = [&](double t) {
      double f = terms[0].a * t * t + terms[0].b * t;  // + const, dropped
      for (std::size_t c = 1; c < terms.size(); ++c) {
        double g = terms[c].a * t * t + terms[c].b * t + terms[c].c;
        bool eqc = !terms[c].one_sided;
        double v = eqc ? g : std::max(0.0, g);
        f += mu * v * v;
      }
      return f;
    };

    double best_t = x(i);
    double best_f = eval(best_t);
    std::vector<double> roots;
    for (std::size_t s = 0; s + 1 < bps.size(); ++s) {
      double lo = bps[s], hi = bps[s + 1];
      double mid = 0.5 * (lo + hi);
      // Active one-sided terms on this segment.
      double q4 = 0, q3 = 0, q2 = terms[0].a, q1 = terms[0].b;
      for (std::size_t c = 1; c < terms.size(); ++c) {
        const auto& q = terms[c];
        double gmid = q.a * mid * mid + q.b * mid + q.c;
        if (q.one_sided && gmid <= 0) continue;
        q4 += mu * q.a * q.a;
        q3 += mu * 2.0 * q.a * q.b;
        q2 += mu * (q.b * q.b + 2.0 * q.a * q.c);
        q1 += mu * 2.0 * q.b * q.c;
      }
      cubic_roots(4 * q4, 3 * q3, 2 * q2, q1, roots);
      roots.push_back(lo);
      roots.push_back(hi);
      for (double t : roots) {
        if (t < lo - 1e-12 || t > hi + 1e-12) continue;
        t = std::clamp(t, 0.0, box);
        double f = eval(t);
        if (f < best_f) {
          best_f = f;
          best_t = t;
        }
      }
    }
    double changed = std::abs(best_t - x(i));
    x(i) = best_t;
    return changed;
  };

  // Starts: corners, grid seeds ranked by mildly penalized value, randoms.
  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  zero(k) = xk;
  starts.push_back(zero);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  ones(k) = xk;
  for (int p : pins) ones(p) = 0.0;
  starts.push_back(ones);
  const int nf = static_cast<int>(free_vars.size());
  if (nf > 0 && std::pow(7.0, nf) <= 3e5) {
    std::vector<std::pair<double, Eigen::VectorXd>> ranked;
    std::vector<int> idx(static_cast<std::size_t>(nf), 0);
    for (;;) {
      Eigen::VectorXd x = zero;
      for (int f = 0; f < nf; ++f)
        x(free_vars[static_cast<std::size_t>(f)]) =
            10.0 * idx[static_cast<std::size_t>(f)] / 6.0;
      ranked.push_back({penalized(x, 1e4), x});
      int f = 0;
      while (f < nf && ++idx[static_cast<std::size_t>(f)] == 7) {
        idx[static_cast<std::size_t>(f)] = 0;
        ++f;
      }
      if (f == nf) break;
    }
    std::partial_sort(ranked.begin(),
                      ranked.begin() + std::min<std::size_t>(16, ranked.size()),
                      ranked.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t s = 0; s < std::min<std::size_t>(16, ranked.size()); ++s)
      starts.push_back(ranked[s].second);
  }
  for (int s = 0; s < 24; ++s) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = unif(rng);
    x(k) = xk;
    for (int p : pins) x(p) = 0.0;
    starts.push_back(x);
  }

  Candidate best;
  for (auto x : starts) {
    for (double mu : {1e2, 1e4, 1e6, 1e8, 1e10}) {
      for (int sweep = 0; sweep < 200; ++sweep) {
        double moved = 0.0;
        for (int i : free_vars) moved = std::max(moved, coordinate_min(x, i, mu));
        if (moved < 1e-12 * (1.0 + x.norm())) break;
      }
    }
    if (violation(sub, x) <= 1e-6 * (1.0 + x.squaredNorm()))
      best.offer(quad_value(sub.objective, x), x);
  }
  return best;
}

}  // namespace

SolveStatus gamma_oracle(const Subproblem& sub_in, const SolverConfig& cfg) {
  auto prep = prepare_gamma(sub_in);
  if (prep.infeasible) return SolveStatus::make_infeasible();
  const Subproblem& sub = prep.sub;
  const int n = sub.size();
  if (n > 8)
    throw std::invalid_argument("gamma_oracle: clique larger than 8 nodes");
  const int k = sub.anchor_local();
  const double xk = std::sqrt(std::max(0.0, sub.anchor_value));

  // Diagonal data: the Gamma problem is the LP of the diagonal relaxation,
  // with x_i = sqrt(X_ii) realizing the optimum as a rank-1 point.
  Subproblem diag_view = sub;
  for (int p : prep.pins)
    diag_view.inf_diagonal.push_back(static_cast<Index>(p));
  if (sub.all_diagonal()) {
    auto lp = solve_block_lp(diag_view);
    if (!lp.optimal()) return lp;
    Eigen::VectorXd x = lp.block.diagonal().cwiseMax(0.0).cwiseSqrt();
    SolveStatus out;
    out.kind = SolveStatus::Kind::Optimal;
    out.block = x * x.transpose();
    out.value = lp.value;
    return out;
  }

  Classified cls = classify(sub);
  for (int p : prep.pins) cls.pins.push_back(p);
  std::sort(cls.pins.begin(), cls.pins.end());
  cls.pins.erase(std::unique(cls.pins.begin(), cls.pins.end()),
                 cls.pins.end());

  bool exact = cls.exact;
  Candidate best;
  bool any_feasible_branch = false;
  bool unbounded = false;

  if (cls.exact) {
    // Anchor pinned to zero while lambda > 0 is an immediate contradiction.
    if (std::binary_search(cls.pins.begin(), cls.pins.end(), k) &&
        sub.anchor_value > 0)
      return SolveStatus::make_infeasible();

    const int npairs = static_cast<int>(cls.pairs.size());
    if (npairs > 16)
      throw std::invalid_argument("gamma_oracle: too many complementarities");
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(n);
    fixed(k) = xk;

    for (unsigned bmask = 0; bmask < (1u << npairs) && !unbounded; ++bmask) {
      std::vector<bool> zero(static_cast<std::size_t>(n), false);
      for (int p : cls.pins) zero[static_cast<std::size_t>(p)] = true;
      for (int pr = 0; pr < npairs; ++pr) {
        auto [i, j] = cls.pairs[static_cast<std::size_t>(pr)];
        zero[static_cast<std::size_t>(((bmask >> pr) & 1u) ? j : i)] = true;
      }
      if (zero[static_cast<std::size_t>(k)] && sub.anchor_value > 0) continue;
      Branch br;
      for (int i = 0; i < n; ++i)
        if (i != k && !zero[static_cast<std::size_t>(i)])
          br.free_vars.push_back(i);
      const int nf = static_cast<int>(br.free_vars.size());
      br.a = Eigen::MatrixXd::Zero(cls.lin_rows.rows(), nf);
      for (int f = 0; f < nf; ++f) br.a.col(f) = cls.lin_rows.col(br.free_vars[f]);
      br.b = -xk * cls.lin_rows.col(k);

      if (!detail::lp_feasible(br.a, br.b)) continue;
      any_feasible_branch = true;

      if (branch_polytope_bounded(br)) {
        enumerate_faces(br, sub.objective, fixed, best);
        continue;
      }
      double rq = recession_quadratic_min(br, sub.objective, n);
      if (rq < -cfg.unbounded_tol) {
        unbounded = true;
        break;
      }
      if (rq > cfg.unbounded_tol) {
        // Every ray eventually increases; Frank-Wolfe gives attainment.
        enumerate_faces(br, sub.objective, fixed, best);
      } else {
        // Flat rays: face enumeration still yields an upper bound.
        enumerate_faces(br, sub.objective, fixed, best);
        exact = false;
      }
    }
    if (unbounded) return SolveStatus::make_unbounded();
    if (!any_feasible_branch) return SolveStatus::make_infeasible();
  }

  if (!exact) {
    Candidate heur = penalty_descent(sub, cls.pins, cfg);
    if (heur.found) best.offer(heur.value, heur.x);
  }

  if (!best.found) {
    SolveStatus out = SolveStatus::make_infeasible();
    out.heuristic = !exact;
    return out;
  }
  SolveStatus out;
  out.kind = SolveStatus::Kind::Optimal;
  out.block = best.x * best.x.transpose();
  out.value = best.value;
  out.heuristic = !exact;
  return out;
}

namespace {

// Branch loop shared by the feasibility scans: pins plus one side of every
// complementarity pair zeroed, then a phase-1 LP on the free variables.
// normalize_sum adds sum(x_F) = 1 (nonzero recession points).
GammaFeasibility branch_feasibility(const Subproblem& sub,
                                    const std::vector<int>& extra_pins,
                                    double anchor_x, bool normalize_sum) {
  const int n = sub.size();
  const int k = sub.anchor_local();
  Classified cls = classify(sub);
  if (!cls.exact) return GammaFeasibility::Unknown;
  for (int p : extra_pins) cls.pins.push_back(p);
  std::sort(cls.pins.begin(), cls.pins.end());
  cls.pins.erase(std::unique(cls.pins.begin(), cls.pins.end()),
                 cls.pins.end());
  if (anchor_x > 0.0 &&
      std::binary_search(cls.pins.begin(), cls.pins.end(), k))
    return GammaFeasibility::Empty;

  const int npairs = static_cast<int>(cls.pairs.size());
  if (npairs > 14) return GammaFeasibility::Unknown;
  for (unsigned bmask = 0; bmask < (1u << npairs); ++bmask) {
    std::vector<bool> zero(static_cast<std::size_t>(n), false);
    for (int p : cls.pins) zero[static_cast<std::size_t>(p)] = true;
    for (int pr = 0; pr < npairs; ++pr) {
      auto [i, j] = cls.pairs[static_cast<std::size_t>(pr)];
      zero[static_cast<std::size_t>(((bmask >> pr) & 1u) ? j : i)] = true;
    }
    if (zero[static_cast<std::size_t>(k)] && anchor_x > 0) continue;
    std::vector<int> free_vars;
    for (int i = 0; i < n; ++i)
      if (i != k && !zero[static_cast<std::size_t>(i)]) free_vars.push_back(i);
    const int nf = static_cast<int>(free_vars.size());
    if (normalize_sum && nf == 0) continue;
    const int rows = static_cast<int>(cls.lin_rows.rows());
    Eigen::MatrixXd a(rows + (normalize_sum ? 1 : 0), nf);
    Eigen::VectorXd b(a.rows());
    for (int f = 0; f < nf; ++f)
      a.col(f).head(rows) = cls.lin_rows.col(free_vars[f]);
    b.head(rows) = -anchor_x * cls.lin_rows.col(k);
    if (normalize_sum) {
      a.row(rows).setOnes();
      b(rows) = 1.0;
    }
    if (detail::lp_feasible(a, b)) return GammaFeasibility::Feasible;
  }
  return GammaFeasibility::Empty;
}

}  // namespace

GammaFeasibility gamma_feasible(const Subproblem& sub_in,
                                const SolverConfig& cfg) {
  (void)cfg;
  auto prep = prepare_gamma(sub_in);
  if (prep.infeasible) return GammaFeasibility::Empty;
  return branch_feasibility(prep.sub, prep.pins,
                            std::sqrt(std::max(0.0, prep.sub.anchor_value)),
                            false);
}

GammaFeasibility gamma_recession_point(const Subproblem& sub_in,
                                       const SolverConfig& cfg) {
  (void)cfg;
  auto prep = prepare_gamma(sub_in);
  if (prep.infeasible) return GammaFeasibility::Unknown;
  std::vector<int> pins = prep.pins;
  pins.push_back(static_cast<int>(prep.sub.anchor_local()));
  return branch_feasibility(prep.sub, pins, 0.0, true);
}

}  // namespace cliquecop
