// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "interp/dynamics.hpp"
#include "interp/oracles.hpp"
#include "interp/serialize.hpp"
#include "interp/spheres.hpp"

using namespace interp;
using interp::testing::random_cvec;
using interp::testing::random_unit;

namespace {

constexpr double kPi = std::numbers::pi;
const SolverConfig kCfg{};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

CMat hpd2() {
  CMat A(2, 2);
  A << 2.0, cplx(0.5, 0.5), cplx(0.5, -0.5), 1.0;
  return A;
}

Couple mixed_couple() { return make_couple(quadratic(hpd2()), lp_norm(3, 2)); }

/// The two diagonal families: (l4, l4/3) and (l1.05, l40).
std::vector<LpCoupleSpec> diagonal_specs(Index n) {
  return {lp_couple_spec(4, 4.0 / 3, n), lp_couple_spec(1.05, 40, n)};
}

// (l_inf, l_1) surrogate
LpCoupleSpec surrogate(Index n) { return lp_couple_spec(40, 1.05, n); }

CVec signed_power(const CVec& x, double e) {
  CVec y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double r = std::abs(x(i));
    y(i) = r == 0 ? cplx(0) : x(i) / r * std::pow(r, e);
  }
  return y;
}

Outcome masses() {
  double worst = 0;
  for (int k = 1; k <= 9; ++k) {
    const double th = 0.1 * k;
    for (const BoundaryGrid& g : {make_grid(th, 2048), make_clustered_grid(th, 2048)})
      worst = std::max({worst, std::abs(g.mass(0) - (1 - th)), std::abs(g.mass(1) - th)});
  }
  return {worst <= 1e-8, fmt("max mass error %.2e over theta = 0.1..0.9, M = 2048", worst)};
}

Outcome calderon_vs_oracle() {
  std::mt19937_64 rng(1001);
  double worst = 0;
  int solves = 0, unconverged = 0;
  for (Index n : {2, 4, 8})
    for (const LpCoupleSpec& s : diagonal_specs(n)) {
      const Couple c = to_couple(s);
      for (double th : {0.25, 0.5, 0.75}) {
        const StripBasis b(th, kCfg);
        for (int k = 0; k < 20; ++k) {
          const CVec x = random_unit(rng, s, th);
          const NormResult r = calderon_norm(c, b, x, kCfg);
          worst = std::max(worst, std::abs(r.value - 1));
          unconverged += r.report.converged ? 0 : 1;
          ++solves;
        }
      }
    }
  const StripBasis probe(0.5, kCfg);
  return {worst <= 1e-3,
          fmt("max rel error %.2e over %d solves (%d unconverged); basis: disk degree %ld + %ld "
              "exponential rates, M = %ld",
              worst, solves, unconverged, long(probe.K()), long(probe.rates().size()), long(kCfg.M))};
}

Outcome minimal_vs_closed_form() {
  std::mt19937_64 rng(1002);
  double worst = 0, flat = 0;
  for (Index n : {2, 4, 8})
    for (const LpCoupleSpec& s : diagonal_specs(n)) {
      const Couple c = to_couple(s);
      for (double th : {0.25, 0.5, 0.75}) {
        const StripBasis b(th, kCfg);
        for (int k = 0; k < 3; ++k) {
          const CVec x = random_unit(rng, s, th);
          const MinimalFunction f = f2_minimal(c, b, x, kCfg);
          flat = std::max(flat, boundary_flatness(f, b));
          for (int i = 1; i <= 5; ++i)
            for (int j = -2; j <= 2; ++j) {
              const cplx z(i / 6.0, 0.5 * j);
              worst = std::max(worst, (eval(f.fn, z) - lp_minimal_function(s, th, x, z)).norm());
            }
        }
      }
    }
  return {worst <= 1e-3 && flat <= 1e-2, fmt("sup error %.2e on 5x5 grids, flatness %.2e", worst, flat)};
}

Outcome omega_operator() {
  std::mt19937_64 rng(1003);
  double worst = 0;
  for (Index n : {2, 4})
    for (const LpCoupleSpec& s : diagonal_specs(n))
      for (double th : {0.25, 0.5, 0.75}) {
        const CVec x = random_unit(rng, s, th);
        const CVec w = omega(to_couple(s), StripBasis(th, kCfg), x, 1, kCfg);
        worst = std::max(worst, interp::testing::max_abs(w - lp_omega(s, th, x)));
      }
  // Kalton-Peck form a x log(|x| / ||x||) on the surrogate, a from its exponents
  double kp = 0, raw = 0;
  for (double th : {0.3, 0.5, 0.7}) {
    const LpCoupleSpec s = surrogate(3);
    const CVec x = random_unit(rng, s, th);
    const CVec w = omega(to_couple(s), StripBasis(th, kCfg), x, 1, kCfg);
    const double a = vertical_rate(s, th);
    CVec form(x.size()), ideal(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      const double r = std::abs(x(i));
      form(i) = r == 0 ? cplx(0) : a * x(i) * std::log(r);
      ideal(i) = r == 0 ? cplx(0) : x(i) * std::log(r) / th;
    }
    kp = std::max(kp, interp::testing::max_abs(w - form));
    raw = std::max(raw, interp::testing::max_abs(w - ideal));
  }
  return {worst <= 1e-2 && kp <= 2e-2,
          fmt("oracle sup error %.2e; surrogate Kalton-Peck error %.2e (against 1/theta: %.2e)", worst, kp, raw)};
}

Outcome k_functional_checks() {
  std::mt19937_64 rng(1004);
  double worst = 0;
  const std::vector<Couple> pairs{to_couple(lp_couple_spec(4, 4.0 / 3, 2)), make_couple(lp_norm(2, 2), lp_norm(1, 2)),
                                  mixed_couple()};
  for (const Couple& c : pairs) {
    const CVec x = random_cvec(rng, 2);
    for (double t : {0.1, 0.7, 1.0, 3.0, 10.0}) {
      const BruteForceK bf = brute_force_k_functional(c, x, t);
      worst = std::max(worst, std::abs(k_functional(c, x, t).value - bf.value) - bf.error_bound);
    }
  }
  int shape_failures = 0;
  const std::vector<Couple> shapes{to_couple(lp_couple_spec(4, 4.0 / 3, 3)), mixed_couple(),
                                   make_couple(lp_norm(1, 2), lp_norm(kInf, 2))};
  for (const Couple& c : shapes) {
    const CVec x = random_cvec(rng, c.n());
    std::vector<double> t, K;
    for (int k = 0; k <= 40; ++k) t.push_back(std::pow(10.0, -2 + 4.0 * k / 40));
    for (double tk : t) K.push_back(k_functional(c, x, tk).value);
    for (std::size_t k = 1; k < t.size(); ++k) {
      if (K[k] < K[k - 1] - 1e-9) ++shape_failures;
      if (k + 1 < t.size()) {
        const double lam = (t[k + 1] - t[k]) / (t[k + 1] - t[k - 1]);
        if (K[k] < lam * K[k - 1] + (1 - lam) * K[k + 1] - 1e-7) ++shape_failures;
      }
    }
  }
  return {worst <= 1e-3 && shape_failures == 0,
          fmt("max oracle excess %.2e, shape violations %d on 41-point grids", std::max(worst, 0.0), shape_failures)};
}

Outcome gagliardo() {
  std::mt19937_64 rng(1005);
  double worst = 0;
  const std::vector<Couple> couples{to_couple(lp_couple_spec(4, 4.0 / 3, 2)), mixed_couple(),
                                    make_couple(lp_norm(2, 3), lp_norm(1, 3))};
  for (const Couple& c : couples)
    for (int k = 0; k < 20; ++k) {
      const CVec x = random_cvec(rng, c.n());
      worst = std::max({worst, std::abs(gagliardo_norm(c, x, 0) - norm_eval(c.x0, x)),
                        std::abs(gagliardo_norm(c, x, 1) - norm_eval(c.x1, x))});
    }
  return {worst <= 1e-3, fmt("max endpoint gap %.2e over 3 couples x 20 vectors", worst)};
}

Outcome norm_path_checks() {
  std::mt19937_64 rng(1006);
  const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double gap = 0, slack = 0;
  const std::vector<Couple> couples{to_couple(lp_couple_spec(4, 4.0 / 3, 2)), mixed_couple()};
  for (const Couple& c : couples)
    for (int k = 0; k < 2; ++k) {
      const NormPath p = norm_path(c, random_cvec(rng, 2), grid, kCfg);
      gap = std::max({gap, p.gap0, p.gap1});
      slack = std::max(slack, p.convexity_slack);
    }
  return {gap <= 1e-2 && slack <= 1e-6, fmt("endpoint gap %.2e, log-convexity slack %.2e", gap, slack)};
}

Outcome vertical_dynamics() {
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> u(-2, 2);
  const Couple c = mixed_couple();
  double group = 0, preserve = 0;
  for (double th : {0.35, 0.6}) {
    const StripBasis b(th, kCfg);
    CVec x = random_cvec(rng, 2);
    x /= theta_norm(c, b, x, kCfg, ThetaNorm::Energy);
    for (int k = 0; k < 3; ++k) {
      const double t = u(rng), s = u(rng);
      const CVec ys = vertical_map(c, b, s, x, kCfg);
      preserve = std::max(preserve, std::abs(theta_norm(c, b, ys, kCfg, ThetaNorm::Energy) - 1));
      group = std::max(group, theta_norm(c, b, vertical_map(c, b, t + s, x, kCfg) - vertical_map(c, b, t, ys, kCfg),
                                         kCfg, ThetaNorm::Energy));
    }
  }
  double orbit = 0;
  for (const LpCoupleSpec& s : diagonal_specs(3))
    for (double th : {0.4, 0.6}) {
      const CVec x = random_unit(rng, s, th);
      const Couple c3 = to_couple(s);
      OrbitSampler sampler(c3, th, x, kCfg);
      for (double t : {-4.0, -1.5, 0.7, 2.5, 5.0})
        orbit = std::max(orbit, interp::testing::max_abs(sampler.at(t) - lp_minimal_function(s, th, x, cplx(th, t))));
    }
  return {group <= 2e-3 && preserve <= 2e-3 && orbit <= 1e-3,
          fmt("group law %.2e, norm drift %.2e, closed-form orbit %.2e", group, preserve, orbit)};
}

LpCoupleSpec common_weights(double w) {
  LpCoupleSpec s = lp_couple_spec(4, 4.0 / 3, 2);
  s.w0.setConstant(w);
  s.w1.setConstant(w);
  return s;
}

Outcome classification() {
  const LpCoupleSpec plain = lp_couple_spec(4, 4.0 / 3, 2);
  const OrbitClass sing = classify_orbit(to_couple(plain), 0.5, CVec{{0.0, 1.0}}, kCfg);
  const LpCoupleSpec per = common_weights(1 / (std::exp(-2.0) + std::exp(-4.0)));
  const OrbitClass p = classify_orbit(to_couple(per), 0.5, CVec{{std::exp(-1.0), std::exp(-2.0)}}, kCfg);
  const LpCoupleSpec ap = common_weights(1 / (std::exp(-2.0) + std::exp(-2 * kPi)));
  const OrbitClass a = classify_orbit(to_couple(ap), 0.5, CVec{{std::exp(-1.0), std::exp(-kPi)}}, kCfg);
  const double T = 2 * kPi / vertical_rate(per, 0.5);
  const bool ok = sing.kind == OrbitClass::Kind::Singular && p.kind == OrbitClass::Kind::Periodic &&
                  std::abs(p.period - T) <= 1e-9 && p.recurrence_residual >= 0 && p.recurrence_residual <= 1e-3 &&
                  a.kind == OrbitClass::Kind::Aperiodic;
  return {ok, fmt("%s / %s (T = %.6f, residual %.2e) / %s", kind_name(sing.kind), kind_name(p.kind), p.period,
                  p.recurrence_residual, kind_name(a.kind))};
}

Outcome fourier_pairing() {
  const LpCoupleSpec per = common_weights(1 / (std::exp(-2.0) + std::exp(-4.0)));
  const FourierReport f = periodic_fourier_check(to_couple(per), 0.5, CVec{{std::exp(-1.0), std::exp(-2.0)}},
                                                 2 * kPi / vertical_rate(per, 0.5), kCfg, 32, 128);
  return {f.pairing_sum <= 1e-2 && f.off_diagonal <= 1e-2,
          fmt("|sum <d_-n, c_n> - 1| = %.2e, off-diagonal %.2e, |n| <= 32", f.pairing_sum, f.off_diagonal)};
}

Outcome sphere_maps() {
  std::mt19937_64 rng(1011);
  const LpCoupleSpec s = lp_couple_spec(4, 4.0 / 3, 2);
  const Couple c = to_couple(s);
  double trip = 0;
  for (auto [th, tp] : {std::pair{0.5, 0.3}, std::pair{0.4, 0.7}, std::pair{0.25, 0.75}}) {
    for (int k = 0; k < 3; ++k) {
      const CVec x = random_unit(rng, s, th);
      trip = std::max(trip, interp::testing::max_abs(daher_map(c, tp, th, daher_map(c, th, tp, x, kCfg), kCfg) - x));
    }
  }
  ProbeOptions opt;
  opt.n_pairs = 2000;
  opt.seed = 2026;
  const SphereMap exact = [&s](double from, double to, const CVec& x) {
    return signed_power(x, theta_exponent(s, from) / theta_exponent(s, to));
  };
  const ModulusReport solver = modulus_probe(c, 0.5, 0.3, opt, kCfg);
  const ModulusReport closed = modulus_probe(c, 0.5, 0.3, opt, kCfg, exact);
  double rel = 0;
  int censored_mismatch = 0;
  auto compare = [&](const std::vector<ModulusRow>& a, const std::vector<ModulusRow>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k].censored != b[k].censored) ++censored_mismatch;
      rel = std::max(rel, std::abs(a[k].alpha_hat - b[k].alpha_hat) / b[k].alpha_hat);
    }
  };
  compare(solver.rows, closed.rows);
  compare(solver.inverse, closed.inverse);
  return {trip <= 5e-3 && rel <= 0.1 && censored_mismatch == 0,
          fmt("round trip %.2e; modulus tables max rel diff %.2e at n_pairs = 2000", trip, rel)};
}

std::string rows_text(const ModulusReport& r) {
  json j = json::array();
  for (const auto& row : r.rows)
    j.push_back({row.s, row.t, row.eps, row.alpha_hat, row.censored, row.n_pairs});
  return j.dump() + verdict_name(r.verdict) + std::to_string(r.spread);
}

Outcome uniformity() {
  const std::vector<double> s_grid{0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
  const std::vector<double> t_grid{-2, -1, 0, 1, 2};
  ProbeOptions opt;
  opt.seed = 12;
  opt.n_pairs = 600;  // alpha-hat spread from sampling alone exceeds 2 at 100 pairs
  std::string detail;
  bool ok = true;
  for (const auto& [name, s] : {std::pair{"(l4, l4/3)", lp_couple_spec(4, 4.0 / 3, 2)},
                                std::pair{"surrogate", surrogate(2)}}) {
    const Couple c = to_couple(s);
    const ModulusReport a = uniformity_probe(c, s_grid, t_grid, opt, kCfg);
    const ModulusReport b = uniformity_probe(c, s_grid, t_grid, opt, kCfg);
    const bool same = rows_text(a) == rows_text(b);
    ok = ok && a.verdict == ModulusReport::Verdict::UniformAcrossGrid && same;
    detail += fmt("%s%s %s spread %.2f%s", detail.empty() ? "" : "; ", name, verdict_name(a.verdict), a.spread,
                  same ? "" : " NOT deterministic");
  }
  return {ok, detail + fmt(" at n_pairs = %d", opt.n_pairs)};
}

Outcome solver_hygiene() {
  std::mt19937_64 rng(1013);
  std::normal_distribution<double> g;
  const std::vector<Couple> couples{to_couple(lp_couple_spec(4, 4.0 / 3, 2)), to_couple(lp_couple_spec(1.05, 40, 3)),
                                    mixed_couple()};
  double grad = 0;
  int points = 0;
  for (int k = 0; k < 50; ++k) {
    const Couple& c = couples[std::size_t(k % 3)];
    const StripBasis b(0.25 + 0.5 * (k % 5) / 4.0, kCfg);
    const CVec x = random_cvec(rng, c.n());
    auto fam = boundary_family(c, b, x, kCfg);
    Eigen::VectorXd v(fam->vars());
    for (Index i = 0; i < v.size(); ++i) v(i) = 0.1 * g(rng);
    grad = std::max({grad, gradient_check(energy_objective(*fam, b.mu()), v),
                     gradient_check(softmax_objective(*fam, b.mu(), 1.0 / 64), v)});
    ++points;
  }
  double spread = 0;
  for (const Couple& c : {mixed_couple(), to_couple(lp_couple_spec(4, 4.0 / 3, 3))}) {
    const StripBasis b(0.55, kCfg);
    const CVec x = random_cvec(rng, c.n());
    const MinimalFunction ref = f2_minimal(c, b, x, kCfg);
    const CMat vref = eval_many(ref.fn, b.z());
    for (int k = 0; k < 5; ++k) {
      RVec warm(ref.state.size());
      for (Index i = 0; i < warm.size(); ++i) warm(i) = g(rng);
      const MinimalFunction f = f2_minimal(c, b, x, kCfg, &warm);
      spread = std::max(spread, (eval_many(f.fn, b.z()) - vref).cwiseAbs().maxCoeff());
    }
  }
  return {grad <= 1e-5 && spread <= 1e-4,
          fmt("max relative gradient error %.2e on %d points; multi-start spread %.2e", grad, points, spread)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget;  // seconds, 0 for none
  };
  const std::vector<Criterion> all{
      {1, "harmonic-measure masses", masses, 1.0},
      {2, "Calderon norm vs l_p oracle", calderon_vs_oracle, 60.0},
      {3, "minimal function vs closed form", minimal_vs_closed_form, 0},
      {4, "Omega operator", omega_operator, 0},
      {5, "K-functional", k_functional_checks, 0},
      {6, "Gagliardo completion", gagliardo, 0},
      {7, "norm-path endpoints and log-convexity", norm_path_checks, 0},
      {8, "vertical dynamics", vertical_dynamics, 0},
      {9, "orbit classification", classification, 0},
      {10, "periodic Fourier pairing", fourier_pairing, 0},
      {11, "sphere maps and modulus tables", sphere_maps, 0},
      {12, "uniformity probe", uniformity, 0},
      {13, "solver hygiene", solver_hygiene, 0},
  };
  // optional arguments select criteria by number
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0, ran = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.1f s", secs);
    if (c.budget > 0) {
      timing += fmt(" of %.0f s budget", c.budget);
      if (secs > c.budget) o.pass = false;
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s  %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
