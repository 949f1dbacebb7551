// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_SOLVER_HPP
#define INTERP_SOLVER_HPP

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace interp {

struct SolveReport {
  double objective = 0;
  int iterations = 0;
  int evaluations = 0;
  double grad_norm = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

struct LbfgsOptions {
  double tol = 1e-10;       // gradient 2-norm at exit
  int max_iter = 4000;
  int memory = 20;
  double ftol = 1e-16;      // relative decrease counted as stagnation
  int stall_limit = 20;     // consecutive stagnant steps before giving up
  double accept = 0;        // converged iff gradient <= max(tol, accept)
};

template <typename Scalar>
using Objective = std::function<Scalar(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&,
                                       Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>;

/// Approximate inverse Hessian used as the initial L-BFGS matrix; rebuilt at the
/// start and every refresh_every iterations. rebuild() returning false falls back to
/// the scaled identity.
template <typename Scalar>
struct Preconditioner {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  std::function<bool(const Vec&)> rebuild;
  std::function<void(const Vec&, Vec&)> apply;
  int refresh_every = 25;
};

/// Quasi-Newton (limited-memory BFGS) descent with Armijo backtracking.
template <typename Scalar>
SolveReport minimize_smooth(const Objective<Scalar>& f, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                            const LbfgsOptions& opt, const Preconditioner<Scalar>* pre = nullptr) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  SolveReport rep;
  Vec g(x.size()), gn(x.size()), xn(x.size());
  Scalar fx = f(x, g);
  int evals = 1;
  if (!std::isfinite(double(fx)) || !g.allFinite())
    throw std::domain_error("objective is not finite at the initial point");

  std::deque<Vec> S, Y;
  std::deque<Scalar> rho;
  int stall = 0;
  int it = 0;
  bool use_pre = pre && pre->rebuild(x);
  for (; it < opt.max_iter; ++it) {
    if (g.norm() <= opt.tol) break;
    if (use_pre && it > 0 && pre->refresh_every > 0 && it % pre->refresh_every == 0)
      use_pre = pre->rebuild(x);
    // two-loop recursion
    Vec q = g;
    std::vector<Scalar> alpha(S.size());
    for (int k = int(S.size()) - 1; k >= 0; --k) {
      alpha[k] = rho[k] * S[k].dot(q);
      q -= alpha[k] * Y[k];
    }
    if (use_pre) {
      Vec r;
      pre->apply(q, r);
      q = r;
    } else {
      Scalar gamma = S.empty() ? Scalar(1) / std::max(Scalar(1), g.norm())
                               : S.back().dot(Y.back()) / Y.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t k = 0; k < S.size(); ++k) {
      Scalar beta = rho[k] * Y[k].dot(q);
      q += (alpha[k] - beta) * S[k];
    }
    Vec d = -q;
    Scalar slope = g.dot(d);
    if (!(slope < 0)) {
      S.clear(), Y.clear(), rho.clear();
      d = -g / std::max(Scalar(1), g.norm());
      slope = g.dot(d);
    }

    Scalar step = 1;
    Scalar fn = 0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * d;
      fn = f(xn, gn);
      ++evals;
      if (std::isfinite(double(fn)) && fn <= fx + Scalar(1e-4) * step * slope) {
        accepted = true;
        break;
      }
      step *= Scalar(0.5);
    }
    if (!accepted) {
      if (S.empty()) break;
      S.clear(), Y.clear(), rho.clear();
      continue;
    }

    Vec s = xn - x, y = gn - g;
    const Scalar sy = s.dot(y);
    if (sy > Scalar(1e-14) * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(Scalar(1) / sy);
      if (int(S.size()) > opt.memory) S.pop_front(), Y.pop_front(), rho.pop_front();
    }
    const Scalar decrease = fx - fn;
    x = xn;
    g = gn;
    fx = fn;
    stall = (decrease <= Scalar(opt.ftol) * std::max(Scalar(1), std::abs(fx))) ? stall + 1 : 0;
    if (stall >= opt.stall_limit) {
      ++it;
      break;
    }
  }
  rep.objective = double(fx);
  rep.iterations = it;
  rep.evaluations = evals;
  rep.grad_norm = double(g.norm());
  rep.converged = rep.grad_norm <= std::max(opt.tol, opt.accept);
  return rep;
}

/// Family of nonnegative values N_m(v) over boundary nodes.
/// pullback() returns sum_m c_m grad N_m at the point of the latest values() call.
class NodeFamily {
 public:
  virtual ~NodeFamily() = default;
  virtual Eigen::Index size() const = 0;
  virtual Eigen::Index vars() const = 0;
  virtual void values(const Eigen::VectorXd& v, Eigen::VectorXd& N) = 0;
  virtual void pullback(const Eigen::VectorXd& c, Eigen::VectorXd& grad) = 0;

  /// Curvature model of sum_m (alpha_m Hess N_m + beta_m grad N_m grad N_m^T) at v, with
  /// c_m the node weights used to average the node Hessians. Families without a model
  /// leave the identity in place.
  virtual bool build_model(const Eigen::VectorXd& v, const Eigen::VectorXd& alpha,
                           const Eigen::VectorXd& beta, const Eigen::VectorXd& c) {
    (void)v, (void)alpha, (void)beta, (void)c;
    return false;
  }
  /// Approximate inverse of the model applied to a gradient.
  virtual void apply_model(const Eigen::VectorXd& g, Eigen::VectorXd& out) { out = g; }
};

/// sum_m mu_m N_m(v)^2; fam must outlive the objective.
Objective<double> energy_objective(NodeFamily& fam, const Eigen::VectorXd& mu);
/// tau log sum_m (mu_m / sum mu) exp(N_m / tau); fam must outlive the objective.
Objective<double> softmax_objective(NodeFamily& fam, const Eigen::VectorXd& mu, double tau);

/// sum_m mu_m N_m(v)^2
SolveReport minimize_energy(NodeFamily& fam, const Eigen::VectorXd& mu, Eigen::VectorXd& v,
                            const LbfgsOptions& opt, bool precondition = true);

struct MinimaxOptions {
  bool precondition = false;
  LbfgsOptions stage{1e-9, 60, 20, 1e-16, 20};
  int ladder = 3;              // temperatures tau0 .. tau0 2^-(ladder-1)
  double tau0 = 0.0625;
};

struct MinimaxResult {
  SolveReport report;          // objective = true max over the masked nodes
  double smoothed = 0;         // last softmax value
};

/// Minimises max_m N_m through the measure-weighted softmax
///   tau log sum_m mu_m exp(N_m / tau)
/// on a halving temperature ladder; keeps the point with the smallest true max over mask.
MinimaxResult minimize_minimax(NodeFamily& fam, const Eigen::VectorXd& mu,
                               const std::vector<bool>& mask, Eigen::VectorXd& v,
                               const MinimaxOptions& opt);

/// Largest relative deviation between the analytic gradient and central differences.
double gradient_check(const Objective<double>& f, const Eigen::VectorXd& x, double h = 1e-6);

}  // namespace interp

#endif  // INTERP_SOLVER_HPP
