// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/strip.hpp"

#include <algorithm>

namespace interp {

namespace {

constexpr double kPi = std::numbers::pi;

struct Arc {
  double start, length, mass;
};

// side 1 is the arc (0, 2 pi theta) of the circle, side 0 the rest
Arc side_arc(double theta, int side) {
  if (side == 1) return {0.0, 2 * kPi * theta, theta};
  return {2 * kPi * theta, 2 * kPi * (1 - theta), 1 - theta};
}

void sort_side(RVec& t, RVec& w) {
  std::vector<Index> idx(t.size());
  for (Index i = 0; i < t.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return t(a) < t(b); });
  RVec ts(t.size()), ws(w.size());
  for (Index i = 0; i < t.size(); ++i) {
    ts(i) = t(idx[i]);
    ws(i) = w(idx[i]);
  }
  t = ts;
  w = ws;
}

double node_height(double theta, double phi) {
  return inverse_conformal_map(theta, std::polar(1.0, phi)).imag();
}

}  // namespace

BoundaryGrid make_grid(double theta, Index M) {
  detail::check_theta(theta);
  if (M < 16) throw std::invalid_argument("grid needs at least 16 nodes per side");
  BoundaryGrid g;
  g.theta = theta;
  g.kind = GridKind::Circle;
  for (int side = 0; side < 2; ++side) {
    const Arc a = side_arc(theta, side);
    g.t[side].resize(M);
    g.w[side].setConstant(M, a.mass / double(M));
    for (Index k = 0; k < M; ++k)
      g.t[side](k) = node_height(theta, a.start + a.length * (k + 0.5) / double(M));
    sort_side(g.t[side], g.w[side]);
  }
  return g;
}

BoundaryGrid make_clustered_grid(double theta, Index M, double t_extent) {
  detail::check_theta(theta);
  if (M < 16) throw std::invalid_argument("grid needs at least 16 nodes per side");
  BoundaryGrid g;
  g.theta = theta;
  g.kind = GridKind::Clustered;
  for (int side = 0; side < 2; ++side) {
    const Arc a = side_arc(theta, side);
    auto build = [&](double S, RVec& t, RVec& w) {
      const double h = 2 * S / double(M);
      t.resize(M);
      w.resize(M);
      for (Index k = 0; k < M; ++k) {
        const double s = -S + (k + 0.5) * h;
        const double frac = 0.5 * (1 + std::tanh(s));
        const double sech = 1 / std::cosh(s);
        t(k) = node_height(theta, a.start + a.length * frac);
        w(k) = 0.5 * sech * sech * h;
      }
    };
    double lo = 0.1, hi = 30.0;
    RVec t, w;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      build(mid, t, w);
      if (t.cwiseAbs().maxCoeff() > t_extent)
        hi = mid;
      else
        lo = mid;
    }
    build(lo, t, w);
    w *= a.mass / w.sum();
    sort_side(t, w);
    g.t[side] = t;
    g.w[side] = w;
  }
  return g;
}

AnalyticFn constant_fn(double theta, const CVec& x) {
  AnalyticFn f;
  f.theta = theta;
  f.n = x.size();
  f.disk = x.transpose();
  f.rates.resize(0);
  f.expo.resize(0, x.size());
  return f;
}

CVec eval(const AnalyticFn& f, const cplx& z) {
  const cplx w = conformal_map(f.theta, z);
  CVec acc = f.disk.row(f.degree()).transpose();
  for (Index k = f.degree() - 1; k >= 0; --k) acc = acc * w + f.disk.row(k).transpose();
  const cplx s = z - f.theta;
  for (Index j = 0; j < f.rates.size(); ++j)
    acc += (std::exp(f.rates(j) * s) - 1.0) * f.expo.row(j).transpose();
  return acc;
}

CMat eval_many(const AnalyticFn& f, const std::vector<cplx>& z) {
  CMat out(Index(z.size()), f.n);
  for (std::size_t i = 0; i < z.size(); ++i) out.row(Index(i)) = eval(f, z[i]).transpose();
  return out;
}

CMat chart_power_series(double theta, Index K, int R) {
  const cplx c = std::polar(1.0, kPi * theta);
  CVec e = CVec::Zero(R + 1);  // exp(i pi s) - 1
  cplx term = 1.0;
  for (int r = 1; r <= R; ++r) {
    term *= cplx(0, kPi) / double(r);
    e(r) = term;
  }
  CVec num = c * e;
  CVec den = c * e;
  den(0) += c - std::conj(c);
  CVec q = CVec::Zero(R + 1);
  for (int r = 0; r <= R; ++r) {
    cplx acc = num(r);
    for (int j = 1; j <= r; ++j) acc -= den(j) * q(r - j);
    q(r) = acc / den(0);
  }
  CMat P = CMat::Zero(K + 1, R + 1);
  P(0, 0) = 1.0;
  for (Index k = 1; k <= K; ++k)
    for (int r = 0; r <= R; ++r) {
      cplx acc = 0;
      for (int j = 0; j <= r; ++j) acc += P(k - 1, j) * q(r - j);
      P(k, r) = acc;
    }
  return P;
}

CVec taylor_coeff(const AnalyticFn& f, int order) {
  if (order < 0 || order > kMaxTaylorOrder) throw std::invalid_argument("taylor order out of range");
  if (order == 0) return f.disk.row(0).transpose();
  CVec out = CVec::Zero(f.n);
  double fact = 1;
  for (int r = 2; r <= order; ++r) fact *= r;
  for (Index j = 0; j < f.rates.size(); ++j)
    out += (std::pow(f.rates(j), order) / fact) * f.expo.row(j).transpose();
  if (f.degree() > 0) {
    CMat P = chart_power_series(f.theta, f.degree(), order);
    for (Index k = 1; k <= f.degree(); ++k) out += P(k, order) * f.disk.row(k).transpose();
  }
  return out;
}

CVec boundary_integral(const AnalyticFn& f, const BoundaryGrid& g) {
  CVec acc = CVec::Zero(f.n);
  for (int side = 0; side < 2; ++side)
    for (Index m = 0; m < g.t[side].size(); ++m)
      acc += g.w[side](m) * eval(f, cplx(side, g.t[side](m)));
  return acc;
}

}  // namespace interp
