#include <random>

#include "doctest.h"
#include "support/oracles.hpp"

#include "cliquecop/ext_real.hpp"
#include "cliquecop/problem.hpp"

using namespace cliquecop;

TEST_SUITE("cop-model") {

TEST_CASE("sparse matrix invariants") {
  SparseSymMatrix m(4);
  m.insert(1, 2, 3.0);
  m.insert(3, 1, -1.0);  // normalized to (1,3)
  CHECK(m.at(2, 1) == 3.0);
  CHECK(m.at(1, 3) == -1.0);
  CHECK(m.at(4, 4) == 0.0);
  CHECK_THROWS_AS(m.insert(2, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(m.insert(0, 1, 1.0), std::out_of_range);
  CHECK_THROWS_AS(m.insert(1, 5, 1.0), std::out_of_range);
}

TEST_CASE("inner product: trace identity") {
  SparseSymMatrix q(2), x(2);
  q.insert(1, 1, 1.0);
  q.insert(2, 2, 1.0);
  x.insert(1, 1, 1.0);
  x.insert(2, 2, 1.0);
  CHECK(q.inner(x) == doctest::Approx(2.0));
}

TEST_CASE("inner product equals dense double loop on random pairs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_int_distribution<Index> dim(1, 9);
  for (int trial = 0; trial < 200; ++trial) {
    Index n = dim(rng);
    SparseSymMatrix q(n), x(n);
    std::uniform_int_distribution<Index> idx(1, n);
    for (int e = 0; e < n; ++e) {
      Index i = idx(rng), j = idx(rng);
      if (i > j) std::swap(i, j);
      double v = val(rng);
      try {
        q.insert(i, j, v);
      } catch (const std::invalid_argument&) {
      }
      i = idx(rng);
      j = idx(rng);
      if (i > j) std::swap(i, j);
      try {
        x.insert(i, j, val(rng));
      } catch (const std::invalid_argument&) {
      }
    }
    double lhs = q.inner(x);
    double rhs = cctest::dense_inner(q, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("evaluate on the first worked constraint") {
  // -8 x1 + x2 + x3 + 2 x4 = 0 encoded as a a^T; x = (1, 8, 0, 0, ...).
  const Index n = 11;
  std::vector<double> a{-8, 1, 1, 2};
  std::vector<Index> support{1, 2, 3, 4};
  SparseSymMatrix q1(n);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j)
      q1.insert(support[i], support[j], a[i] * a[j]);
  SparseSymMatrix q0(n);
  q0.insert(1, 1, 1.0);
  ConicProblem problem(n, q0, {{1, q1}}, {});

  SparseSymMatrix x(n);
  std::vector<double> xv{1, 8, 0, 0};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j)
      if (xv[i] * xv[j] != 0.0) x.insert(support[i], support[j], xv[i] * xv[j]);

  auto ev = evaluate(problem, x);
  CHECK(ev.eq_residuals.at(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev.objective == doctest::Approx(1.0));
  SparseSymMatrix wrong(3);
  CHECK_THROWS(evaluate(problem, wrong));
}

TEST_CASE("import_standard_form homogenizes") {
  SparseSymMatrix qbar(1);
  qbar.insert(1, 1, 1.0);
  SparseSymMatrix cbar(1);
  cbar.insert(1, 1, 1.0);
  auto problem = import_standard_form(qbar, {{cbar, 1.0}});
  CHECK(problem.n() == 2);
  REQUIRE(problem.eq_constraints().size() == 1);
  const auto& m = problem.eq_constraints()[0].matrix;
  CHECK(m.at(1, 1) == -1.0);
  CHECK(m.at(2, 2) == 1.0);
  CHECK(m.at(1, 2) == 0.0);
  CHECK(problem.ineq_constraints().empty());
}

TEST_CASE("import_standard_form zero case") {
  SparseSymMatrix qbar(3);
  auto problem = import_standard_form(qbar, {});
  CHECK(problem.n() == 4);
  CHECK(problem.eq_constraints().empty());
  CHECK(problem.objective().empty());
}

TEST_CASE("import_standard_form dimension mismatch") {
  SparseSymMatrix qbar(3), c2(2);
  CHECK_THROWS_AS(import_standard_form(qbar, {{c2, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("import preserves values on random rank-1 points") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const Index n = 3;
  for (int trial = 0; trial < 100; ++trial) {
    SparseSymMatrix qbar(n), c1(n);
    for (Index i = 1; i <= n; ++i)
      for (Index j = i; j <= n; ++j) {
        qbar.insert(i, j, val(rng));
        c1.insert(i, j, val(rng));
      }
    double d = val(rng);
    auto hom = import_standard_form(qbar, {{c1, d}});

    Eigen::VectorXd y(n);
    for (Index i = 0; i < n; ++i) y(i) = std::abs(val(rng));
    // Standard-form values at Y = y y^T.
    SparseSymMatrix ymat(n);
    for (Index i = 1; i <= n; ++i)
      for (Index j = i; j <= n; ++j) ymat.insert(i, j, y(i - 1) * y(j - 1));
    double obj_std = qbar.inner(ymat);
    double con_std = c1.inner(ymat) - d;

    // Homogenized values at X = (1, y)(1, y)^T.
    SparseSymMatrix xmat(n + 1);
    Eigen::VectorXd xv(n + 1);
    xv(0) = 1.0;
    xv.tail(n) = y;
    for (Index i = 1; i <= n + 1; ++i)
      for (Index j = i; j <= n + 1; ++j) xmat.insert(i, j, xv(i - 1) * xv(j - 1));
    auto ev = evaluate(hom, xmat);
    CHECK(ev.objective == doctest::Approx(obj_std).epsilon(1e-10));
    CHECK(ev.eq_residuals.at(1) == doctest::Approx(con_std).epsilon(1e-10));
  }
}

TEST_CASE("extended reals") {
  ExtReal a(2.0);
  ExtReal inf = ExtReal::infinity();
  CHECK((a + inf).is_infinite());
  CHECK((inf + a).is_infinite());
  CHECK((0.0 * inf).finite() == 0.0);
  CHECK((2.0 * inf).is_infinite());
  CHECK((0.5 * a).finite() == doctest::Approx(1.0));
  CHECK(a < inf);
  CHECK(!(inf < inf));
  CHECK(inf <= inf);
  CHECK(ExtReal(-3.0) < a);
  CHECK_THROWS_AS(inf.finite(), std::logic_error);
  CHECK_THROWS_AS(ExtReal(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("cone ordering predicate") {
  CHECK(cone_subset(ConeKind::GAMMA, ConeKind::CPP));
  CHECK(cone_subset(ConeKind::CPP, ConeKind::DNN));
  CHECK(cone_subset(ConeKind::GAMMA, ConeKind::DNN));
  CHECK(cone_subset(ConeKind::DNN, ConeKind::DNN));
  CHECK(!cone_subset(ConeKind::DNN, ConeKind::CPP));
  CHECK(!cone_subset(ConeKind::CPP, ConeKind::GAMMA));
}

TEST_CASE("constraint ids must be disjoint") {
  SparseSymMatrix q(2), c(2);
  c.insert(1, 1, 1.0);
  CHECK_THROWS_AS(ConicProblem(2, q, {{1, c}}, {{1, c}}),
                  std::invalid_argument);
}

}  // TEST_SUITE
