// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/solver.hpp"

#include <algorithm>
#include <limits>

namespace interp {

using Eigen::Index;
using Eigen::VectorXd;

Objective<double> energy_objective(NodeFamily& fam, const VectorXd& mu) {
  return [&fam, mu, N = VectorXd()](const VectorXd& x, VectorXd& g) mutable {
    fam.values(x, N);
    fam.pullback(2.0 * mu.cwiseProduct(N), g);
    return mu.dot(N.cwiseAbs2());
  };
}

Objective<double> softmax_objective(NodeFamily& fam, const VectorXd& mu, double tau) {
  return [&fam, weights = VectorXd(mu / mu.sum()), tau, N = VectorXd()](const VectorXd& x,
                                                                         VectorXd& g) mutable {
    fam.values(x, N);
    const double mx = N.maxCoeff();
    VectorXd e = weights.array() * ((N.array() - mx) / tau).exp();
    const double Z = e.sum();
    fam.pullback(e / Z, g);
    return mx + tau * std::log(Z);
  };
}

SolveReport minimize_energy(NodeFamily& fam, const VectorXd& mu, VectorXd& v,
                            const LbfgsOptions& opt, bool precondition) {
  const Objective<double> f = energy_objective(fam, mu);
  Preconditioner<double> pre;
  pre.rebuild = [&](const VectorXd& x) {
    VectorXd Nx;
    fam.values(x, Nx);
    return fam.build_model(x, 2.0 * mu.cwiseProduct(Nx), 2.0 * mu, mu);
  };
  pre.apply = [&](const VectorXd& g, VectorXd& out) { fam.apply_model(g, out); };
  return minimize_smooth(f, v, opt, precondition ? &pre : nullptr);
}

namespace {

double masked_max(const VectorXd& N, const std::vector<bool>& mask) {
  double m = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < N.size(); ++i)
    if (mask.empty() || mask[std::size_t(i)]) m = std::max(m, N(i));
  return m;
}

}  // namespace

MinimaxResult minimize_minimax(NodeFamily& fam, const VectorXd& mu, const std::vector<bool>& mask,
                               VectorXd& v, const MinimaxOptions& opt) {
  const VectorXd weights = mu / mu.sum();
  VectorXd N;
  fam.values(v, N);
  VectorXd best = v;
  double best_max = masked_max(N, mask);

  MinimaxResult res;
  int total = 0, evals = 0;
  SolveReport last;
  for (int k = 0; k < opt.ladder; ++k) {
    const double tau = opt.tau0 * std::ldexp(1.0, -k);
    const Objective<double> f = softmax_objective(fam, mu, tau);
    Preconditioner<double> pre;
    pre.rebuild = [&](const VectorXd& x) {
      VectorXd Nx;
      fam.values(x, Nx);
      const double mx = Nx.maxCoeff();
      VectorXd pi = weights.array() * ((Nx.array() - mx) / tau).exp();
      pi /= pi.sum();
      return fam.build_model(x, pi, pi / tau, pi);
    };
    pre.apply = [&](const VectorXd& g, VectorXd& out) { fam.apply_model(g, out); };
    last = minimize_smooth(f, v, opt.stage, opt.precondition ? &pre : nullptr);
    total += last.iterations;
    evals += last.evaluations;
    fam.values(v, N);
    const double m = masked_max(N, mask);
    if (m < best_max) {
      best_max = m;
      best = v;
    }
  }
  v = best;
  res.smoothed = last.objective;
  res.report.objective = best_max;
  res.report.iterations = total;
  res.report.evaluations = evals;
  res.report.grad_norm = last.grad_norm;
  res.report.converged = last.converged;
  return res;
}

double gradient_check(const Objective<double>& f, const VectorXd& x, double h) {
  VectorXd g(x.size()), tmp(x.size());
  f(x, g);
  VectorXd fd(x.size());
  VectorXd xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = xp(i);
    xp(i) = xi + h;
    const double fp = f(xp, tmp);
    xp(i) = xi - h;
    const double fm = f(xp, tmp);
    xp(i) = xi;
    fd(i) = (fp - fm) / (2 * h);
  }
  return (fd - g).norm() / std::max(g.norm(), 1e-300);
}

}  // namespace interp
