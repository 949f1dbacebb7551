// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "interp/interpolation.hpp"
#include "interp/oracles.hpp"
#include "interp/solver.hpp"

using namespace interp;
using Eigen::VectorXd;

TEST_CASE("minimize_smooth finds the centre of a quadratic bowl") {
  VectorXd target(4);
  target << 1, -2, 0.5, 3;
  Objective<double> f = [&](const VectorXd& c, VectorXd& g) {
    g = 2 * (c - target);
    return (c - target).squaredNorm();
  };
  VectorXd c = VectorXd::Zero(4);
  const SolveReport r = minimize_smooth(f, c, LbfgsOptions{1e-10, 100});
  CHECK(r.converged);
  CHECK(r.grad_norm <= 1e-10);
  CHECK((c - target).norm() <= 1e-10);
}

TEST_CASE("minimize_smooth handles a degenerate quartic") {
  Objective<double> f = [](const VectorXd& c, VectorXd& g) {
    g.resize(1);
    g(0) = 4 * std::pow(c(0), 3);
    return std::pow(c(0), 4);
  };
  VectorXd c = VectorXd::Ones(1);
  const double tol = 1e-10;
  const SolveReport r = minimize_smooth(f, c, LbfgsOptions{tol, 10000});
  CHECK(r.converged);
  CHECK(std::abs(c(0)) <= std::pow(tol, 0.25));
}

TEST_CASE("minimize_smooth rejects a non-finite start") {
  Objective<double> f = [](const VectorXd& c, VectorXd& g) {
    g = c;
    return std::log(c(0));
  };
  VectorXd c = -VectorXd::Ones(1);
  CHECK_THROWS_AS(minimize_smooth(f, c, LbfgsOptions{}), std::domain_error);
}

TEST_CASE("converged reports respect the tolerance") {
  Objective<double> f = [](const VectorXd& c, VectorXd& g) {
    g = 2 * c;
    return c.squaredNorm();
  };
  VectorXd c = VectorXd::Constant(3, 5.0);
  const SolveReport r = minimize_smooth(f, c, LbfgsOptions{1e-3, 1});
  CHECK((!r.converged || r.grad_norm <= 1e-3));
}

TEST_CASE("energy minimum matches the closed form on (l4, l4/3)") {
  const LpCoupleSpec s = lp_couple_spec(4, 4.0 / 3, 2);
  const Couple c = to_couple(s);
  std::mt19937_64 rng(21);
  for (double th : {0.3, 0.5}) {
    const CVec x = interp::testing::random_cvec(rng, 2);
    const MinimalFunction f = f2_minimal(c, th, x, SolverConfig{});
    CHECK(f.report.converged);
    CHECK(f.energy == doctest::Approx(lp_interpolation_norm(s, th, x)).epsilon(1e-4));
  }
}

TEST_CASE("minimax value of a singular vector is its constant bound") {
  const Couple c = to_couple(lp_couple_spec(4, 4.0 / 3, 3));
  const CVec x = CVec::Unit(3, 1);
  const NormResult r = calderon_norm(c, 0.4, x, SolverConfig{});
  CHECK(r.value == doctest::Approx(1.0).epsilon(5e-5));
}

TEST_CASE("minimax on the (l_inf, l_1) surrogate is within 2% of l_(1/theta)") {
  const LpCoupleSpec s = lp_couple_spec(40, 1.05, 3);
  const Couple c = to_couple(s);
  std::mt19937_64 rng(9);
  for (double th : {0.3, 0.6}) {
    const CVec x = interp::testing::random_cvec(rng, 3);
    const double target = norm_eval(lp_norm(1 / th, 3), x);
    const NormResult r = calderon_norm(c, th, x, SolverConfig{});
    CHECK(std::abs(r.value - target) <= 0.02 * target);
  }
}

TEST_CASE("enlarging the disk degree does not raise the minimum") {
  const Couple c = make_couple(quadratic(CMat::Identity(2, 2) * 2.0), lp_norm(3, 2));
  CVec x(2);
  x << cplx(1, 0.5), cplx(-0.3, 0.2);
  SolverConfig a, b;
  a.K = 2;
  b.K = 4;
  const double va = calderon_norm(c, 0.5, x, a).value;
  const double vb = calderon_norm(c, 0.5, x, b).value;
  CHECK(vb <= va + 1e-4 * va);
}

TEST_CASE("solver reports are bit-identical across runs") {
  const Couple c = to_couple(lp_couple_spec(4, 4.0 / 3, 2));
  CVec x(2);
  x << cplx(0.3, 0.1), cplx(0.2, -0.7);
  SolverConfig cfg;
  cfg.seed = 42;
  const NormResult a = calderon_norm(c, 0.6, x, cfg);
  const NormResult b = calderon_norm(c, 0.6, x, cfg);
  CHECK(a.value == b.value);
  CHECK(a.energy == b.energy);
  CHECK(a.report.iterations == b.report.iterations);
  CHECK(a.report.grad_norm == b.report.grad_norm);
  CHECK(a.report.seed == 42);
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  const SolverConfig cfg;
  const std::vector<Couple> couples{to_couple(lp_couple_spec(4, 4.0 / 3, 2)),
                                    to_couple(lp_couple_spec(1.05, 40, 3)),
                                    make_couple(quadratic(CMat::Identity(2, 2)), lp_norm(1.5, 2))};
  for (const Couple& c : couples) {
    const StripBasis b(0.4, cfg);
    const CVec x = interp::testing::random_cvec(rng, c.n());
    auto fam = boundary_family(c, b, x, cfg);
    const Objective<double> e = energy_objective(*fam, b.mu());
    const Objective<double> s = softmax_objective(*fam, b.mu(), 1.0 / 64);
    for (int k = 0; k < 5; ++k) {
      VectorXd v(fam->vars());
      for (Index i = 0; i < v.size(); ++i) v(i) = 0.1 * g(rng);
      CHECK(gradient_check(e, v) <= 1e-5);
      CHECK(gradient_check(s, v) <= 1e-5);
    }
  }
}
