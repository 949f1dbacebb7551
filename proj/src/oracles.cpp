// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace interp {

namespace {

RVec log_scale(const RVec& w, double p) {
  if (std::isinf(p)) return w.array().log().matrix();
  return (w.array().log() / p).matrix();
}

// log of u(theta) = rho0^(1-theta) rho1^theta per coordinate
RVec log_u(const LpCoupleSpec& s, double theta) {
  return (1 - theta) * log_scale(s.w0, s.p0) + theta * log_scale(s.w1, s.p1);
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

LpCoupleSpec lp_couple_spec(double p0, double p1, Index n) {
  return LpCoupleSpec{p0, p1, RVec::Ones(n), RVec::Ones(n)};
}

LpCoupleSpec lp_couple_spec(const Couple& c) {
  if (!is_diagonal(c)) throw std::domain_error("closed forms need a diagonal l_p couple");
  const auto& a = std::get<WeightedLp>(c.x0.v);
  const auto& b = std::get<WeightedLp>(c.x1.v);
  return LpCoupleSpec{a.p, b.p, a.w, b.w};
}

Couple to_couple(const LpCoupleSpec& s) {
  return make_couple(weighted_lp(s.p0, s.w0), weighted_lp(s.p1, s.w1));
}

double theta_exponent(const LpCoupleSpec& s, double theta) {
  const double r = (1 - theta) * inv(s.p0) + theta * inv(s.p1);
  return r > 0 ? 1.0 / r : kInf;
}

double vertical_rate(const LpCoupleSpec& s, double theta) {
  return theta_exponent(s, theta) * (inv(s.p1) - inv(s.p0));
}

NormSpec lp_theta_norm(const LpCoupleSpec& s, double theta) {
  const double p = theta_exponent(s, theta);
  const RVec lu = log_u(s, theta);
  if (std::isinf(p)) return weighted_lp(p, lu.array().exp().matrix());
  return weighted_lp(p, (p * lu.array()).exp().matrix());
}

double lp_interpolation_norm(const LpCoupleSpec& s, double theta, const CVec& x) {
  return norm_eval(lp_theta_norm(s, theta), x);
}

CVec lp_minimal_function(const LpCoupleSpec& s, double theta, const CVec& x, const cplx& z) {
  const double nx = lp_interpolation_norm(s, theta, x);
  if (nx == 0) return CVec::Zero(x.size());
  const double pt = theta_exponent(s, theta);
  if (std::isinf(pt)) throw std::domain_error("closed form needs a finite p_theta");
  const RVec lu = log_u(s, theta);
  const RVec l0 = log_scale(s.w0, s.p0), l1 = log_scale(s.w1, s.p1);
  const cplx expo = pt * ((1.0 - z) * inv(s.p0) + z * inv(s.p1));
  CVec out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double ax = std::abs(x(i)) / nx;
    if (ax == 0) {
      out(i) = 0;
      continue;
    }
    const cplx sgn = x(i) / std::abs(x(i));
    const cplx logu_z = (1.0 - z) * l0(i) + z * l1(i);
    out(i) = nx * sgn * std::exp(expo * (lu(i) + std::log(ax)) - logu_z);
  }
  return out;
}

CVec lp_omega(const LpCoupleSpec& s, double theta, const CVec& x) {
  const double nx = lp_interpolation_norm(s, theta, x);
  CVec out = CVec::Zero(x.size());
  if (nx == 0) return out;
  const double a = vertical_rate(s, theta);
  const RVec lu = log_u(s, theta);
  const RVec l0 = log_scale(s.w0, s.p0), l1 = log_scale(s.w1, s.p1);
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) != 0.0)
      out(i) = x(i) * (a * (lu(i) + std::log(std::abs(x(i)) / nx)) - (l1(i) - l0(i)));
  return out;
}

RVec lp_vertical_frequencies(const LpCoupleSpec& s, double theta, const CVec& x) {
  const double nx = lp_interpolation_norm(s, theta, x);
  const double a = vertical_rate(s, theta);
  const RVec lu = log_u(s, theta);
  const RVec l0 = log_scale(s.w0, s.p0), l1 = log_scale(s.w1, s.p1);
  RVec w = RVec::Zero(x.size());
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) != 0.0) w(i) = a * (lu(i) + std::log(std::abs(x(i)) / nx)) - (l1(i) - l0(i));
  return w;
}

BruteForceK brute_force_k_functional(const Couple& c, const CVec& x, double t, int density,
                                     int levels) {
  const Index n = x.size();
  if (n > 2) throw std::domain_error("brute-force K-functional supports n <= 2");
  if (!(t > 0)) throw std::invalid_argument("K-functional needs t > 0");
  if (density < 3 || density % 2 == 0) throw std::invalid_argument("density must be odd and >= 3");
  const int D = 2 * int(n);
  Index total = 1;
  for (int d = 0; d < D; ++d) total *= density;

  RVec center = RVec::Zero(D);
  double R = 3.0 * std::max(x.cwiseAbs().maxCoeff(), 1e-300);
  double best = norm_eval(c.x0, x);
  RVec best_pt = RVec::Zero(D);

  CMat Y(total, n), Xm(total, n);
  for (int lev = 0; lev < levels; ++lev) {
    const double h = 2 * R / (density - 1);
    for (Index k = 0; k < total; ++k) {
      Index rem = k;
      RVec p(D);
      for (int d = 0; d < D; ++d) {
        p(d) = center(d) - R + h * double(rem % density);
        rem /= density;
      }
      for (Index i = 0; i < n; ++i) Y(k, i) = cplx(p(2 * i), p(2 * i + 1));
    }
    Xm = (-Y).rowwise() + x.transpose();
    RVec N0, N1;
    norm_rows(c.x0, Xm, N0, nullptr, 0.0);
    norm_rows(c.x1, Y, N1, nullptr, 0.0);
    Index arg = 0;
    const double v = (N0 + t * N1).minCoeff(&arg);
    if (v < best) {
      best = v;
      for (Index i = 0; i < n; ++i) {
        best_pt(2 * i) = Y(arg, i).real();
        best_pt(2 * i + 1) = Y(arg, i).imag();
      }
    }
    center = best_pt;
    R = 2 * h;
  }
  best = std::min(best, t * norm_eval(c.x1, x));

  double L0 = 0, L1 = 0;
  for (Index i = 0; i < n; ++i) {
    CVec e = CVec::Zero(n);
    e(i) = 1;
    L0 = std::max(L0, norm_eval(c.x0, e));
    L1 = std::max(L1, norm_eval(c.x1, e));
  }
  const double lip = std::sqrt(double(n)) * (L0 + t * L1);
  // final cell half-diagonal
  const double half = 0.5 * (R / 2.0) * std::sqrt(double(D));
  return {best, lip * half};
}

}  // namespace interp
