#include <random>

#include "doctest.h"
#include "support/generators.hpp"

#include "cliquecop/gamma.hpp"
#include "cliquecop/solver.hpp"

using namespace cliquecop;

namespace {

Subproblem make_sub(std::vector<Index> clique, Index anchor,
                    Eigen::MatrixXd objective) {
  Subproblem s;
  s.clique = std::move(clique);
  s.anchor = anchor;
  s.anchor_value = 1.0;
  s.objective = std::move(objective);
  return s;
}

}  // namespace

TEST_SUITE("gamma-oracle") {

TEST_CASE("unconstrained identity objective") {
  SolverConfig cfg;
  auto s = make_sub({1, 2}, 1, Eigen::MatrixXd::Identity(2, 2));
  auto st = gamma_oracle(s, cfg);
  REQUIRE(st.optimal());
  CHECK(!st.heuristic);
  CHECK(st.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(st.block(0, 0) == doctest::Approx(1.0));
  CHECK(st.block(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("complementarity branches on the worked second clique") {
  // {3,5,6,7}, anchor 3: -x3 + x5 + 2 x6 + x7 = 0 and x5 x6 = 0.
  SolverConfig cfg;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(4, 4);
  q.diagonal() << 0, 1, 1, 0.5;
  q(1, 3) = q(3, 1) = 0.25;
  auto s = make_sub({3, 5, 6, 7}, 3, q);
  Eigen::Vector4d a(-1, 1, 2, 1);
  s.eq.push_back({1, a * a.transpose()});
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(4, 4);
  comp(1, 2) = comp(2, 1) = 1.0;
  s.eq.push_back({2, comp});
  auto st = gamma_oracle(s, cfg);
  REQUIRE(st.optimal());
  CHECK(!st.heuristic);  // both branches are linear-equality polytopes
  // The point is feasible and respects the complementarity.
  Eigen::VectorXd x = st.block.diagonal().cwiseSqrt();
  CHECK(std::abs(-x(0) + x(1) + 2 * x(2) + x(3)) <= 1e-9);
  CHECK(x(1) * x(2) <= 1e-9);
  // Cross-check against the DNN relaxation (certified structure).
  auto dnn = solve_block(s, cfg);
  REQUIRE(dnn.optimal());
  CHECK(std::abs(dnn.value - st.value) <= 1e-5 * (1.0 + std::abs(st.value)));
}

TEST_CASE("infeasible branch set") {
  SolverConfig cfg;
  auto s = make_sub({1, 2}, 1, Eigen::MatrixXd::Zero(2, 2));
  // x1 x2 = 0 and x1 + x2 pattern forcing x2 = 2 x1: branches clash.
  Eigen::Vector2d a(-2, 1);  // x2 = 2 x1 = 2
  s.eq.push_back({1, a * a.transpose()});
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(2, 2);
  comp(0, 1) = comp(1, 0) = 1.0;  // x1 x2 = 0 with x1 = 1 forces x2 = 0
  s.eq.push_back({2, comp});
  auto st = gamma_oracle(s, cfg);
  CHECK(st.kind == SolveStatus::Kind::Infeasible);
  CHECK(!st.heuristic);
}

TEST_CASE("unbounded ray through a negative objective direction") {
  SolverConfig cfg;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2, 2);
  q(1, 1) = -1.0;
  auto s = make_sub({1, 2}, 1, q);
  auto st = gamma_oracle(s, cfg);
  CHECK(st.kind == SolveStatus::Kind::Unbounded);
}

TEST_CASE("oracle value dominates the DNN value across random instances") {
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  SolverConfig cfg;
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3;
    Eigen::MatrixXd q(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) q(i, j) = q(j, i) = sym(rng);
    auto s = make_sub({1, 2, 3}, 1, q);
    Eigen::VectorXd a(n);
    a(0) = -coef(rng);
    for (int i = 1; i < n; ++i) a(i) = coef(rng);
    s.eq.push_back({1, a * a.transpose()});
    auto gam = gamma_oracle(s, cfg);
    auto dnn = solve_block(s, cfg);
    if (!gam.optimal() || !dnn.optimal()) continue;
    ++compared;
    CHECK(dnn.value <= gam.value + 1e-6 * (1.0 + std::abs(gam.value)));
    // size <= 4 with dual-cone data: the values coincide.
    CHECK(std::abs(dnn.value - gam.value) <=
          1e-5 * (1.0 + std::abs(gam.value)));
  }
  CHECK(compared >= 150);
}

TEST_CASE("size guard") {
  SolverConfig cfg;
  auto s = make_sub({1, 2, 3, 4, 5, 6, 7, 8, 9}, 1,
                    Eigen::MatrixXd::Identity(9, 9));
  CHECK_THROWS_AS(gamma_oracle(s, cfg), std::invalid_argument);
}

TEST_CASE("heuristic flag on data outside the exact classes") {
  SolverConfig cfg;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(3, 3);
  auto s = make_sub({1, 2, 3}, 1, q);
  Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(3, 3);
  odd(1, 1) = 1.0;
  odd(0, 2) = odd(2, 0) = -0.5;  // x2^2 <= x1 x3: indefinite inequality
  s.ineq.push_back({1, odd});
  auto st = gamma_oracle(s, cfg);
  REQUIRE(st.optimal());
  CHECK(st.heuristic);
  // x = (1, 0, 0) is feasible with value 1; the descent must find it.
  CHECK(st.value == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("gamma feasibility probes") {
  SolverConfig cfg;
  auto s = make_sub({1, 2, 3}, 1, Eigen::MatrixXd::Zero(3, 3));
  Eigen::Vector3d a(-1, 1, 1);
  s.eq.push_back({1, a * a.transpose()});
  CHECK(gamma_feasible(s, cfg) == GammaFeasibility::Feasible);
  CHECK(gamma_recession_point(s, cfg) == GammaFeasibility::Empty);

  // Mixed-sign pattern off the anchor admits a recession point.
  Subproblem m = make_sub({1, 2, 3}, 1, Eigen::MatrixXd::Zero(3, 3));
  Eigen::Vector3d b(-1, 1, -1);
  m.eq.push_back({1, b * b.transpose()});
  CHECK(gamma_recession_point(m, cfg) == GammaFeasibility::Feasible);
}

}  // TEST_SUITE
