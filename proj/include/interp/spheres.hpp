// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_SPHERES_HPP
#define INTERP_SPHERES_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "interp/interpolation.hpp"

namespace interp {

/// x -> F_x(theta'), the map between the unit spheres of X_theta and X_theta'.
CVec daher_map(const Couple& c, const StripBasis& b, double theta_prime, const CVec& x,
               const SolverConfig& cfg);
CVec daher_map(const Couple& c, double theta, double theta_prime, const CVec& x,
               const SolverConfig& cfg);

struct MazurLimitResult {
  CVec x;
  CVec limit;
  std::vector<double> s;
  std::vector<double> side1_norms;  // ||F(s_k)||_1
  double limit_norm = 0;            // ||limit||_1
  double gap = 0;                   // | ||limit||_1 - 1 |
  double extrapolation_err = 0;
  bool in_delta = false;
  bool converged = true;
  std::string note;
};

/// Limit of F_x(s) as s -> 1 by Richardson extrapolation on s_k = 1 - 2^-k, k = 2..k_max.
MazurLimitResult limit_mazur(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg,
                             int k_max = 6, double tol = 1e-2);

/// Distance used on X_theta: closed form on diagonal couples, otherwise one of the
/// two solver norms.
enum class DistanceMode { Auto, Calderon, Energy };

/// Map between spheres, (from, to, x) -> image.
using SphereMap = std::function<CVec(double, double, const CVec&)>;
SphereMap solver_sphere_map(const Couple& c, const SolverConfig& cfg);

struct ModulusRow {
  double s = 0;          // base point of the domain sphere
  double t = 0;          // vertical time (uniformity tables), 0 otherwise
  double eps = 0;
  double alpha_hat = 0;  // smallest domain distance among pairs with image distance >= eps
  bool censored = false; // no pair reached eps; alpha_hat is the largest sampled distance
  int n_pairs = 0;
};

struct ModulusReport {
  enum class Verdict { UniformAcrossGrid, Degrading, Inconclusive, None };
  std::string kind;                  // "modulus" or "uniformity"
  double theta = 0, theta_prime = 0;
  std::vector<double> eps_grid, s_grid, t_grid;
  int n_pairs = 0;
  std::uint64_t seed = 0;
  std::vector<ModulusRow> rows;      // forward map (or vertical maps)
  std::vector<ModulusRow> inverse;   // theta' -> theta, modulus probe only
  Verdict verdict = Verdict::None;
  double spread = 0;                 // largest alpha ratio across s at fixed (eps, t)
  double grid_spread = 0;            // largest alpha ratio across the whole (s, t) grid
  // norm-gap inequality on the F^2 distance of minimal functions
  int inequality_checked = 0;
  int inequality_violations = 0;
  double inequality_max_excess = 0;
  double max_sphere_defect = 0;      // max | ||image||_theta' - 1 |
  bool converged = true;
};

const char* verdict_name(ModulusReport::Verdict v);

struct ProbeOptions {
  int n_pairs = 100;
  std::vector<double> eps_grid{0.05, 0.1, 0.2, 0.4};
  std::uint64_t seed = 1;
  DistanceMode distance = DistanceMode::Auto;
  double spread_factor = 2.0;        // UniformAcrossGrid threshold
  double degrade_ratio = 0.5;        // Degrading: last/first alpha below this, monotone in s
};

/// Empirical (alpha, eps) tables of x -> F_x(theta') and of the reverse map.
ModulusReport modulus_probe(const Couple& c, double theta, double theta_prime,
                            const ProbeOptions& opt, const SolverConfig& cfg,
                            const SphereMap& map = {});

/// Vertical maps x -> F_x(s + i t) on S_{X_s}: (s, x, t_grid) -> images.
using VerticalFamily = std::function<std::vector<CVec>(double, const CVec&, const std::vector<double>&)>;
VerticalFamily solver_vertical_family(const Couple& c, const SolverConfig& cfg);

ModulusReport uniformity_probe(const Couple& c, const std::vector<double>& s_grid,
                               const std::vector<double>& t_grid, const ProbeOptions& opt,
                               const SolverConfig& cfg, const VerticalFamily& family = {});

/// Deterministic pair sampler: x uniform-direction unit vector in X_s, y = normalize(x + r g)
/// with r graded geometrically over [eps_min / 4, 2 eps_max].
struct SpherePair {
  CVec x, y;
};
std::vector<SpherePair> sample_pairs(const Couple& c, double s, const ProbeOptions& opt,
                                     const SolverConfig& cfg);

/// ||v||_theta under the chosen distance mode.
double sphere_distance(const Couple& c, double theta, const CVec& v, DistanceMode mode,
                       const SolverConfig& cfg);

}  // namespace interp

#endif  // INTERP_SPHERES_HPP
