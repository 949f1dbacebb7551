// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "interp/dynamics.hpp"
#include "interp/oracles.hpp"

using namespace interp;
using interp::testing::random_cvec;
using interp::testing::random_unit;

namespace {

const SolverConfig kCfg{};
constexpr double kPi = std::numbers::pi;

LpCoupleSpec common_weights(double w) {
  LpCoupleSpec s = lp_couple_spec(4, 4.0 / 3, 2);
  s.w0.setConstant(w);
  s.w1.setConstant(w);
  return s;
}

LpCoupleSpec periodic_spec() { return common_weights(1 / (std::exp(-2.0) + std::exp(-4.0))); }
LpCoupleSpec aperiodic_spec() { return common_weights(1 / (std::exp(-2.0) + std::exp(-2 * kPi))); }

Couple mixed_couple() {
  CMat A(2, 2);
  A << 2.0, cplx(0.5, 0.5), cplx(0.5, -0.5), 1.0;
  return make_couple(quadratic(A), lp_norm(3, 2));
}

}  // namespace

TEST_CASE("vertical map at t = 0 is the identity") {
  std::mt19937_64 rng(41);
  const Couple c = mixed_couple();
  const CVec x = random_cvec(rng, 2);
  CHECK((vertical_map(c, 0.5, 0.0, x, kCfg) - x).norm() <= 1e-8);
}

TEST_CASE("vertical maps follow the closed form on diagonal couples") {
  std::mt19937_64 rng(42);
  for (auto [p0, p1] : {std::pair{4.0, 4.0 / 3}, std::pair{40.0, 2.0}}) {
    const LpCoupleSpec s = lp_couple_spec(p0, p1, 3);
    const Couple c = to_couple(s);
    for (double th : {0.4, 0.6}) {
      const CVec x = random_unit(rng, s, th);
      OrbitSampler orbit(c, th, x, kCfg);
      for (double t : {-3.5, -1.0, 0.4, 2.0, 5.0}) {
        const CVec expected = lp_minimal_function(s, th, x, cplx(th, t));
        CHECK(interp::testing::max_abs(orbit.at(t) - expected) <= 1e-3);
      }
      CHECK(orbit.converged());
    }
  }
}

TEST_CASE("vertical maps preserve the norm and compose") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-2, 2);
  const Couple c = mixed_couple();
  const double th = 0.5;
  const StripBasis b(th, kCfg);
  CVec x = random_cvec(rng, 2);
  x /= theta_norm(c, b, x, kCfg, ThetaNorm::Energy);
  for (int k = 0; k < 4; ++k) {
    const double t = u(rng), s = u(rng);
    const CVec ys = vertical_map(c, b, s, x, kCfg);
    const CVec lhs = vertical_map(c, b, t + s, x, kCfg);
    const CVec rhs = vertical_map(c, b, t, ys, kCfg);
    CHECK(std::abs(theta_norm(c, b, ys, kCfg, ThetaNorm::Energy) - 1) <= 2e-3);
    CHECK(theta_norm(c, b, lhs - rhs, kCfg, ThetaNorm::Energy) <= 2e-3);
  }
}

TEST_CASE("orbit samples") {
  const LpCoupleSpec s = lp_couple_spec(4, 4.0 / 3, 2);
  const Couple c = to_couple(s);
  const CVec singular = CVec{{cplx(0, 1), 0.0}};
  for (const CVec& y : orbit_sample(c, 0.5, singular, {-1, 0, 2}, kCfg)) CHECK((y - singular).norm() <= 5e-5);

  const CVec x = CVec{{0.6, 0.8}};
  const auto only = orbit_sample(c, 0.5, x, {0.0}, kCfg);
  REQUIRE(only.size() == 1);
  CHECK((only[0] - x).norm() <= 1e-8);

  const CVec flat = CVec::Ones(2) / std::sqrt(2.0);
  const auto moving = orbit_sample(c, 0.5, flat, {0.0, 1.0}, kCfg);
  CHECK((moving[1] - moving[0]).norm() > 0.1);
}

TEST_CASE("rational relations") {
  long p = 0, q = 0;
  CHECK(rational_approximation(0.5, 1e-9, 64, p, q));
  CHECK(p == 1);
  CHECK(q == 2);
  CHECK(rational_approximation(-7.0 / 3, 1e-9, 64, p, q));
  CHECK(p == -7);
  CHECK(q == 3);
  CHECK_FALSE(rational_approximation(kPi, 1e-9, 64, p, q));
}

TEST_CASE("singular orbits") {
  const Couple c = to_couple(lp_couple_spec(4, 4.0 / 3, 3));
  const OrbitClass k = classify_orbit(c, 0.5, CVec{{1.0, 0.0, 0.0}}, kCfg);
  CHECK(k.kind == OrbitClass::Kind::Singular);
  const OrbitClass k2 = classify_orbit(c, 0.3, CVec{{0.0, cplx(0, 1), 0.0}}, kCfg);
  CHECK(k2.kind == OrbitClass::Kind::Singular);
  CHECK(std::string(kind_name(k2.kind)) == "Singular");
}

TEST_CASE("periodic orbit with log-moduli (-1, -2)") {
  const LpCoupleSpec s = periodic_spec();
  const CVec x = CVec{{std::exp(-1.0), std::exp(-2.0)}};
  REQUIRE(lp_interpolation_norm(s, 0.5, x) == doctest::Approx(1.0));
  const OrbitClass k = classify_orbit(to_couple(s), 0.5, x, kCfg);
  REQUIRE(k.kind == OrbitClass::Kind::Periodic);
  CHECK(k.period == doctest::Approx(2 * kPi / vertical_rate(s, 0.5)));
  CHECK(k.constant == doctest::Approx(1.0));
  CHECK(k.multipliers == std::vector<long>{-1, -2});
  CHECK(k.recurrence_residual >= 0);
  CHECK(k.recurrence_residual <= 1e-3);
}

TEST_CASE("phases do not change the period") {
  const LpCoupleSpec s = periodic_spec();
  const CVec x = CVec{{std::polar(std::exp(-1.0), 0.7), std::polar(std::exp(-2.0), -2.0)}};
  const OrbitClass k = classify_orbit(to_couple(s), 0.5, x, kCfg);
  REQUIRE(k.kind == OrbitClass::Kind::Periodic);
  CHECK(k.period == doctest::Approx(2 * kPi));
}

TEST_CASE("aperiodic orbit with log-moduli (-1, -pi)") {
  const LpCoupleSpec s = aperiodic_spec();
  const CVec x = CVec{{std::exp(-1.0), std::exp(-kPi)}};
  REQUIRE(lp_interpolation_norm(s, 0.5, x) == doctest::Approx(1.0));
  const OrbitClass k = classify_orbit(to_couple(s), 0.5, x, kCfg);
  CHECK(k.kind == OrbitClass::Kind::Aperiodic);
  // closed-form orbit never returns within the scanned window
  const double a = vertical_rate(s, 0.5);
  double closest = 1e9;
  for (double t = 0.5; t <= 100 / a; t += 0.01)
    closest = std::min(closest, (lp_minimal_function(s, 0.5, x, cplx(0.5, t)) - x).norm());
  CHECK(closest > 1e-3);
}

TEST_CASE("general couples use the recurrence scan") {
  std::mt19937_64 rng(44);
  const Couple c = mixed_couple();
  CVec x = random_cvec(rng, 2);
  x /= theta_norm(c, StripBasis(0.5, kCfg), x, kCfg, ThetaNorm::Calderon);
  ClassifyOptions opt;
  opt.scan_max = 4;
  const OrbitClass k = classify_orbit(c, 0.5, x, kCfg, opt);
  CHECK(k.kind != OrbitClass::Kind::Aperiodic);
  if (k.kind == OrbitClass::Kind::Periodic) CHECK(k.recurrence_residual <= opt.tol);
  CHECK_THROWS_AS(classify_orbit(c, 0.5, CVec::Zero(2), kCfg), std::invalid_argument);
}

TEST_CASE("Fourier pairing on the periodic example") {
  const LpCoupleSpec s = periodic_spec();
  const CVec x = CVec{{std::exp(-1.0), std::exp(-2.0)}};
  const FourierReport f = periodic_fourier_check(to_couple(s), 0.5, x, 2 * kPi, kCfg);
  CHECK(f.converged);
  CHECK(f.pairing_sum <= 1e-2);
  CHECK(f.off_diagonal <= 1e-2);
  CHECK(f.reconstruction_residual <= 1e-3);
  CHECK(f.functional_reconstruction_residual <= 1e-3);
  CHECK(f.functional_recurrence <= 1e-3);
  // each coordinate rotates at an integer multiple of 2 pi / T
  const RVec w = lp_vertical_frequencies(s, 0.5, x);
  for (Index i = 0; i < 2; ++i) {
    const int k = int(std::lround(w(i)));
    CHECK(std::abs(w(i) - k) <= 1e-9);
    CHECK(std::abs(f.c[std::size_t(f.nmax + k)](i) - x(i)) <= 1e-3);
  }
}

TEST_CASE("Fourier pairing of a singular vector") {
  const LpCoupleSpec s = lp_couple_spec(4, 4.0 / 3, 2);
  const CVec x = CVec{{0.0, 1.0}};
  const FourierReport f = periodic_fourier_check(to_couple(s), 0.5, x, 1.0, kCfg, 4, 16);
  CHECK((f.c[4] - x).norm() <= 1e-6);
  for (int k = -4; k <= 4; ++k)
    if (k != 0) CHECK(f.c[std::size_t(k + 4)].norm() <= 1e-6);
  CHECK(f.pairing_sum <= 1e-6);
}

TEST_CASE("Fourier check rejects non-periodic input") {
  const LpCoupleSpec s = aperiodic_spec();
  const CVec x = CVec{{std::exp(-1.0), std::exp(-kPi)}};
  CHECK_THROWS_AS(periodic_fourier_check(to_couple(s), 0.5, x, 2 * kPi, kCfg), std::domain_error);
  CHECK_THROWS_AS(periodic_fourier_check(mixed_couple(), 0.5, CVec::Ones(2), 1.0, kCfg), std::domain_error);
}
