// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_DYNAMICS_HPP
#define INTERP_DYNAMICS_HPP

#include <map>
#include <string>
#include <vector>

#include "interp/interpolation.hpp"

namespace interp {

/// Orbit of x under the vertical maps: evaluations of minimal functions re-solved at
/// anchor points t = k * spacing, each query read at offset at most spacing / 2.
class OrbitSampler {
 public:
  OrbitSampler(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg,
               double spacing = 2.0);
  OrbitSampler(const Couple& c, const StripBasis& b, const CVec& x, const SolverConfig& cfg,
               double spacing = 2.0);

  CVec at(double t);
  const StripBasis& basis() const { return *basis_; }
  int solves() const { return int(anchors_.size()); }
  bool converged() const { return converged_; }

 private:
  const MinimalFunction& anchor(int k);

  Couple c_;
  std::shared_ptr<const StripBasis> basis_;
  CVec x_;
  SolverConfig cfg_;
  double spacing_;
  std::map<int, MinimalFunction> anchors_;
  bool converged_ = true;
};

/// x -> F_x(theta + i t); longer steps are composed from pieces of at most max_step.
CVec vertical_map(const Couple& c, const StripBasis& b, double t, const CVec& x,
                  const SolverConfig& cfg, double max_step = 2.0);
CVec vertical_map(const Couple& c, double theta, double t, const CVec& x, const SolverConfig& cfg);

std::vector<CVec> orbit_sample(const Couple& c, double theta, const CVec& x,
                               const std::vector<double>& t_grid, const SolverConfig& cfg);

struct OrbitClass {
  enum class Kind { Singular, Periodic, Aperiodic, Inconclusive };
  Kind kind = Kind::Inconclusive;
  double period = 0;
  double constant = 0;               // C with m_n = C log|x_n| in the unweighted case
  std::vector<long> multipliers;     // m_n
  RVec frequencies;                  // vertical phase rates
  double norm0 = 0, norm1 = 0;
  double recurrence_residual = -1;   // ||phi^T(x) - x||_theta, -1 when not computed
  std::string note;
};

const char* kind_name(OrbitClass::Kind k);

struct ClassifyOptions {
  double tol = 1e-3;
  double rel_tol = 1e-9;     // rational relation tolerance
  long max_multiplier = 64;
  bool verify = true;        // compute the recurrence residual at T
  double scan_max = 20.0;    // recurrence scan range for general couples
  double scan_step = 0.05;
};

/// Smallest-denominator p/q with |r - p/q| <= tol and q <= qmax, via continued fractions.
bool rational_approximation(double r, double tol, long qmax, long& p, long& q);

OrbitClass classify_orbit(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg,
                          const ClassifyOptions& opt = {});

struct FourierReport {
  int nmax = 32;
  int samples = 128;
  double period = 0;
  std::vector<CVec> c, d;              // index n + nmax
  double reconstruction_residual = 0;  // F at half-step points
  double functional_reconstruction_residual = 0;
  double pairing_sum = 0;              // |sum_n <d_-n, c_n> - 1|
  double off_diagonal = 0;             // max_{k != 0} |sum_{n+m=k} <d_n, c_m>|
  double recurrence = 0;               // ||F(T) - F(0)||_2
  double functional_recurrence = 0;    // ||phi(T) - phi(0)||_2
  bool converged = true;
};

FourierReport periodic_fourier_check(const Couple& c, double theta, const CVec& x, double T,
                                     const SolverConfig& cfg, int nmax = 32, int samples = 128);

}  // namespace interp

#endif  // INTERP_DYNAMICS_HPP
