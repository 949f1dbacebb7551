// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_STRIP_HPP
#define INTERP_STRIP_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "interp/norms.hpp"

namespace interp {

namespace detail {
template <typename Scalar>
void check_theta(Scalar theta) {
  if (!(theta > 0 && theta < 1)) throw std::invalid_argument("theta must lie in (0,1)");
}
template <typename Scalar>
void check_in_strip(const std::complex<Scalar>& z) {
  const Scalar slack = Scalar(1e-12);
  if (!(z.real() >= -slack && z.real() <= 1 + slack) || !std::isfinite(z.imag()))
    throw std::domain_error("point outside the closed strip");
}
}  // namespace detail

/// Chart of the strip onto the unit disk sending theta to 0.
template <typename Scalar>
std::complex<Scalar> conformal_map(Scalar theta, const std::complex<Scalar>& z) {
  detail::check_theta(theta);
  detail::check_in_strip(z);
  using C = std::complex<Scalar>;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const C c = std::polar(Scalar(1), pi * theta);
  const C h = std::exp(C(0, pi) * z);
  return (h - c) / (h - std::conj(c));
}

template <typename Scalar>
std::complex<Scalar> inverse_conformal_map(Scalar theta, const std::complex<Scalar>& w) {
  detail::check_theta(theta);
  using C = std::complex<Scalar>;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const C c = std::polar(Scalar(1), pi * theta);
  const C h = (c - w * std::conj(c)) / (Scalar(1) - w);
  return C(std::arg(h) / pi, -std::log(std::abs(h)) / pi);
}

template <typename Scalar>
std::complex<Scalar> conformal_map_derivative(Scalar theta, const std::complex<Scalar>& z) {
  using C = std::complex<Scalar>;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const C c = std::polar(Scalar(1), pi * theta);
  const C h = std::exp(C(0, pi) * z);
  const C d = h - std::conj(c);
  return C(0, pi) * h * (c - std::conj(c)) / (d * d);
}

/// Harmonic-measure density of side + i t seen from theta.
template <typename Scalar>
Scalar poisson_density(Scalar theta, int side, Scalar t) {
  detail::check_theta(theta);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar s = std::sin(pi * theta), c = std::cos(pi * theta);
  const Scalar ch = std::cosh(pi * t);
  if (!std::isfinite(ch)) return Scalar(0);
  return s / (2 * (side == 0 ? ch - c : ch + c));
}

enum class GridKind { Circle, Clustered };

struct BoundaryGrid {
  double theta = 0.5;
  RVec t[2];
  RVec w[2];
  GridKind kind = GridKind::Circle;

  double mass(int side) const { return w[side].sum(); }
};

/// Images of a uniform circle grid, M nodes per side.
BoundaryGrid make_grid(double theta, Index M);
/// tanh-clustered circle grid whose extreme nodes reach |t| = t_extent on both sides.
BoundaryGrid make_clustered_grid(double theta, Index M, double t_extent = 6.0);

/// Analytic map of the strip into C^n:
///   F(z) = sum_k disk_k m(z)^k + sum_j expo_j (exp(rate_j (z - theta)) - 1)
/// with m the chart centred at theta, so F(theta) = disk_0.
struct AnalyticFn {
  double theta = 0.5;
  Index n = 0;
  CMat disk;  // (K+1) x n
  RVec rates;
  CMat expo;  // rates.size() x n

  Index degree() const { return disk.rows() - 1; }
};

AnalyticFn constant_fn(double theta, const CVec& x);
CVec eval(const AnalyticFn& f, const cplx& z);
/// One row per point.
CMat eval_many(const AnalyticFn& f, const std::vector<cplx>& z);
/// Strip-variable Taylor coefficient of the given order at theta.
CVec taylor_coeff(const AnalyticFn& f, int order);
inline constexpr int kMaxTaylorOrder = 48;

/// Taylor coefficients of m^k around theta, rows k = 0..K, columns orders 0..R.
CMat chart_power_series(double theta, Index K, int R);

/// Quadrature of f against the harmonic measure of theta on both sides.
CVec boundary_integral(const AnalyticFn& f, const BoundaryGrid& g);

}  // namespace interp

#endif  // INTERP_STRIP_HPP
