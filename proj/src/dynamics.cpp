// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "interp/oracles.hpp"

namespace interp {

namespace {

// ||v||_theta: closed form on diagonal couples, F^2 quotient value otherwise
double theta_distance(const Couple& c, const StripBasis& b, const CVec& v, const SolverConfig& cfg) {
  if (v.isZero(0.0)) return 0.0;
  if (is_diagonal(c)) return lp_interpolation_norm(lp_couple_spec(c), b.theta(), v);
  return theta_norm(c, b, v, cfg, ThetaNorm::Energy);
}

// ||v||_0^(1-theta) ||v||_1^theta, an upper bound for ||v||_theta
double theta_bound(const Couple& c, double theta, const CVec& v) {
  return std::pow(norm_eval(c.x0, v), 1 - theta) * std::pow(norm_eval(c.x1, v), theta);
}

}  // namespace

OrbitSampler::OrbitSampler(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg,
                           double spacing)
    : c_(c),
      basis_(std::make_shared<const StripBasis>(theta, cfg)),
      x_(x),
      cfg_(cfg),
      spacing_(spacing) {
  if (!(spacing > 0)) throw std::invalid_argument("anchor spacing must be positive");
}

OrbitSampler::OrbitSampler(const Couple& c, const StripBasis& b, const CVec& x,
                           const SolverConfig& cfg, double spacing)
    : c_(c), basis_(std::make_shared<const StripBasis>(b)), x_(x), cfg_(cfg), spacing_(spacing) {
  if (!(spacing > 0)) throw std::invalid_argument("anchor spacing must be positive");
}

const MinimalFunction& OrbitSampler::anchor(int k) {
  auto it = anchors_.find(k);
  if (it != anchors_.end()) return it->second;
  CVec y = x_;
  if (k != 0) {
    const int prev = k > 0 ? k - 1 : k + 1;
    const double step = k > 0 ? spacing_ : -spacing_;
    y = eval(anchor(prev).fn, cplx(basis_->theta(), step));
  }
  MinimalFunction f = f2_minimal(c_, *basis_, y, cfg_);
  converged_ = converged_ && f.report.converged;
  return anchors_.emplace(k, std::move(f)).first->second;
}

CVec OrbitSampler::at(double t) {
  if (x_.isZero(0.0)) return x_;
  const int k = int(std::lround(t / spacing_));
  return eval(anchor(k).fn, cplx(basis_->theta(), t - k * spacing_));
}

CVec vertical_map(const Couple& c, const StripBasis& b, double t, const CVec& x,
                  const SolverConfig& cfg, double max_step) {
  if (t == 0 || x.isZero(0.0)) return x;
  if (!(max_step > 0)) throw std::invalid_argument("max_step must be positive");
  const int steps = std::max(1, int(std::ceil(std::abs(t) / max_step - 1e-12)));
  const double h = t / steps;
  CVec y = x;
  for (int k = 0; k < steps; ++k) y = eval(f2_minimal(c, b, y, cfg).fn, cplx(b.theta(), h));
  return y;
}

CVec vertical_map(const Couple& c, double theta, double t, const CVec& x, const SolverConfig& cfg) {
  StripBasis b(theta, cfg);
  return vertical_map(c, b, t, x, cfg);
}

std::vector<CVec> orbit_sample(const Couple& c, double theta, const CVec& x,
                               const std::vector<double>& t_grid, const SolverConfig& cfg) {
  OrbitSampler s(c, theta, x, cfg);
  std::vector<CVec> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(s.at(t));
  return out;
}

const char* kind_name(OrbitClass::Kind k) {
  switch (k) {
    case OrbitClass::Kind::Singular:
      return "Singular";
    case OrbitClass::Kind::Periodic:
      return "Periodic";
    case OrbitClass::Kind::Aperiodic:
      return "Aperiodic";
    case OrbitClass::Kind::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

bool rational_approximation(double r, double tol, long qmax, long& p, long& q) {
  if (!std::isfinite(r)) return false;
  // convergents h_k / k_k of the continued fraction of r
  long h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  double x = r;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(x);
    if (std::abs(a) > 1e15) return false;
    const long ai = long(a);
    const long h = ai * h0 + h1, k = ai * k0 + k1;
    if (k > qmax) return false;
    h1 = h0, h0 = h, k1 = k0, k0 = k;
    if (std::abs(r - double(h) / double(k)) <= tol) {
      p = h, q = k;
      return true;
    }
    const double frac = x - a;
    if (frac <= 0) return false;
    x = 1.0 / frac;
  }
  return false;
}

OrbitClass classify_orbit(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg,
                          const ClassifyOptions& opt) {
  if (x.size() != c.n()) throw std::invalid_argument("dimension mismatch between couple and x");
  if (x.isZero(0.0)) throw std::invalid_argument("orbit of the zero vector");
  OrbitClass out;
  const bool diagonal = is_diagonal(c);
  StripBasis b(theta, cfg);
  const double nx = diagonal ? lp_interpolation_norm(lp_couple_spec(c), theta, x)
                             : calderon_norm(c, b, x, cfg).value;
  const CVec u = x / nx;
  if (std::abs(nx - 1) > opt.tol) out.note = "input rescaled to the unit sphere";
  out.norm0 = norm_eval(c.x0, u);
  out.norm1 = norm_eval(c.x1, u);
  if (std::abs(out.norm0 - 1) <= opt.tol && std::abs(out.norm1 - 1) <= opt.tol) {
    out.kind = OrbitClass::Kind::Singular;
    out.multipliers.assign(std::size_t(x.size()), 0);
    out.frequencies = RVec::Zero(x.size());
    return out;
  }

  if (diagonal) {
    const LpCoupleSpec s = lp_couple_spec(c);
    out.frequencies = lp_vertical_frequencies(s, theta, u);
    const double a = vertical_rate(s, theta);
    const double scale = std::max(out.frequencies.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<Index> moving;
    for (Index i = 0; i < u.size(); ++i)
      if (u(i) != 0.0 && std::abs(out.frequencies(i)) > opt.rel_tol * scale) moving.push_back(i);
    if (moving.empty()) {
      out.kind = OrbitClass::Kind::Singular;
      out.multipliers.assign(std::size_t(x.size()), 0);
      out.note = "stationary orbit";
      return out;
    }
    Index ref = moving.front();
    for (Index i : moving)
      if (std::abs(out.frequencies(i)) < std::abs(out.frequencies(ref))) ref = i;
    const double wr = std::abs(out.frequencies(ref));
    // omega_i / |omega_ref| = p_i / q_i; fundamental = |omega_ref| gcd(p) / lcm(q)
    std::vector<long> P, Q;
    long L = 1;
    for (Index i : moving) {
      long p = 0, q = 1;
      if (!rational_approximation(out.frequencies(i) / wr, opt.rel_tol, opt.max_multiplier, p, q)) {
        out.kind = OrbitClass::Kind::Aperiodic;
        out.note = "no rational relation between the vertical frequencies";
        return out;
      }
      P.push_back(p), Q.push_back(q);
      L = std::lcm(L, q);
    }
    long g = 0;
    for (std::size_t k = 0; k < P.size(); ++k) g = std::gcd(g, std::abs(P[k] * (L / Q[k])));
    const double w0 = wr * double(g) / double(L);
    out.multipliers.assign(std::size_t(x.size()), 0);
    for (std::size_t k = 0; k < P.size(); ++k) {
      const long m = P[k] * (L / Q[k]) / g;
      if (std::abs(m) > opt.max_multiplier) {
        out.kind = OrbitClass::Kind::Aperiodic;
        out.note = "multipliers exceed the search bound";
        out.multipliers.clear();
        return out;
      }
      out.multipliers[std::size_t(moving[k])] = m;
    }
    out.kind = OrbitClass::Kind::Periodic;
    out.period = 2 * std::numbers::pi / w0;
    out.constant = std::abs(a) / w0;
    if (opt.verify) {
      OrbitSampler sampler(c, b, u, cfg);
      out.recurrence_residual = theta_distance(c, b, sampler.at(out.period) - u, cfg);
    }
    return out;
  }

  // general couples: first return of the orbit to x after leaving its tol-ball
  OrbitSampler sampler(c, b, u, cfg);
  const double th = theta;
  auto dist = [&](double t) { return theta_bound(c, th, sampler.at(t) - u); };
  bool left = false;
  for (double t = opt.scan_step; t <= opt.scan_max + 1e-12; t += opt.scan_step) {
    const double d = dist(t);
    if (!left) {
      left = d > 10 * opt.tol;
      continue;
    }
    if (d > 10 * opt.tol) continue;
    // golden-section refinement around the grid point
    double lo = t - opt.scan_step, hi = t + opt.scan_step;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = dist(c1), f2 = dist(c2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        hi = c2, c2 = c1, f2 = f1;
        c1 = hi - gr * (hi - lo), f1 = dist(c1);
      } else {
        lo = c1, c1 = c2, f1 = f2;
        c2 = lo + gr * (hi - lo), f2 = dist(c2);
      }
    }
    const double tstar = f1 < f2 ? c1 : c2;
    const double r = theta_distance(c, b, sampler.at(tstar) - u, cfg);
    if (r <= opt.tol) {
      out.kind = OrbitClass::Kind::Periodic;
      out.period = tstar;
      out.recurrence_residual = r;
      return out;
    }
  }
  out.kind = OrbitClass::Kind::Inconclusive;
  out.note = left ? "no recurrence on the scanned range" : "orbit stays within tolerance of x";
  return out;
}

FourierReport periodic_fourier_check(const Couple& c, double theta, const CVec& x, double T,
                                     const SolverConfig& cfg, int nmax, int samples) {
  if (!(T > 0)) throw std::invalid_argument("period must be positive");
  if (nmax < 0 || samples < 2 * nmax + 1)
    throw std::invalid_argument("need samples >= 2 nmax + 1");
  if (!is_diagonal(c))
    throw std::domain_error("norming functionals along the orbit need a diagonal l_p couple");
  const LpCoupleSpec s = lp_couple_spec(c);
  const NormSpec Xt = lp_theta_norm(s, theta);
  if (!is_smooth(Xt)) throw std::domain_error("X_theta must be smooth and strictly convex");

  FourierReport rep;
  rep.nmax = nmax;
  rep.samples = samples;
  rep.period = T;
  const Index n = x.size();
  OrbitSampler sampler(c, theta, x, cfg);
  const double two_pi = 2 * std::numbers::pi;

  CMat Fs(samples, n), Ps(samples, n);
  for (int j = 0; j < samples; ++j) {
    const CVec f = sampler.at(T * j / samples);
    Fs.row(j) = f.transpose();
    Ps.row(j) = norming_functional(Xt, f).transpose();
  }
  const CVec fT = sampler.at(T);
  rep.recurrence = (fT - Fs.row(0).transpose()).norm();
  if (rep.recurrence > 1e-2)
    throw std::domain_error("orbit does not recur at the given period");
  rep.functional_recurrence = (norming_functional(Xt, fT) - Ps.row(0).transpose()).norm();

  rep.c.assign(std::size_t(2 * nmax + 1), CVec::Zero(n));
  rep.d.assign(std::size_t(2 * nmax + 1), CVec::Zero(n));
  for (int k = -nmax; k <= nmax; ++k) {
    CVec ck = CVec::Zero(n), dk = CVec::Zero(n);
    for (int j = 0; j < samples; ++j) {
      const cplx e = std::polar(1.0, -two_pi * k * j / samples);
      ck += e * Fs.row(j).transpose();
      dk += e * Ps.row(j).transpose();
    }
    rep.c[std::size_t(k + nmax)] = ck / double(samples);
    rep.d[std::size_t(k + nmax)] = dk / double(samples);
  }

  auto series = [&](const std::vector<CVec>& co, double t) {
    CVec v = CVec::Zero(n);
    for (int k = -nmax; k <= nmax; ++k) v += std::polar(1.0, two_pi * k * t / T) * co[std::size_t(k + nmax)];
    return v;
  };
  for (int j = 0; j < samples; ++j) {
    const double t = T * (j + 0.5) / samples;
    const CVec f = sampler.at(t);
    rep.reconstruction_residual = std::max(rep.reconstruction_residual, (series(rep.c, t) - f).norm());
    rep.functional_reconstruction_residual =
        std::max(rep.functional_reconstruction_residual,
                 (series(rep.d, t) - norming_functional(Xt, f)).norm());
  }

  // sum_{n+m=k} <d_n, c_m> for |k| <= 2 nmax
  for (int k = -2 * nmax; k <= 2 * nmax; ++k) {
    cplx acc = 0;
    for (int m = -nmax; m <= nmax; ++m) {
      const int nn = k - m;
      if (nn < -nmax || nn > nmax) continue;
      acc += pairing(rep.d[std::size_t(nn + nmax)], rep.c[std::size_t(m + nmax)]);
    }
    if (k == 0)
      rep.pairing_sum = std::abs(acc - 1.0);
    else
      rep.off_diagonal = std::max(rep.off_diagonal, std::abs(acc));
  }
  rep.converged = sampler.converged();
  return rep;
}

}  // namespace interp
