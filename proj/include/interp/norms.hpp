// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_NORMS_HPP
#define INTERP_NORMS_HPP

#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace interp {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct NormSpec;

// ||x|| = (sum_i w_i |x_i|^p)^(1/p); for p = inf, max_i w_i |x_i|.
struct WeightedLp {
  double p;
  RVec w;
};

// ||x|| = sqrt(x^H A x)
struct Quadratic {
  CMat A;
};

struct MaxOf {
  std::vector<NormSpec> of;
};

struct Scaled {
  double c;
  std::shared_ptr<const NormSpec> inner;
};

struct NormSpec {
  std::variant<WeightedLp, Quadratic, MaxOf, Scaled> v;
};

enum class Convexity { StrictlyConvex, NotStrictlyConvex, Unknown };

NormSpec weighted_lp(double p, const RVec& w);
NormSpec lp_norm(double p, Index n);
NormSpec quadratic(const CMat& A);
NormSpec max_of(std::vector<NormSpec> of);
NormSpec scaled(double c, const NormSpec& inner);

Index dim(const NormSpec& s);
Convexity strict_convexity(const NormSpec& s);
/// True when the gauge is differentiable away from 0 (1 < p < inf, Quadratic, scalings of these).
bool is_smooth(const NormSpec& s);

/// Multiplicative per-coordinate scale rho with ||x|| = ||rho .* x||_p for a weighted lp norm.
RVec lp_scale(const WeightedLp& s);

double norm_eval(const NormSpec& s, const CVec& x);
double dual_norm_eval(const NormSpec& s, const CVec& phi);
CVec norming_functional(const NormSpec& s, const CVec& x);

/// Bilinear pairing sum_i phi_i x_i.
inline cplx pairing(const CVec& phi, const CVec& x) { return (phi.array() * x.array()).sum(); }

/// Sup of |<phi, x>| / ||x|| by sampled search with local refinement; n <= 3.
double dual_norm_search(const NormSpec& s, const CVec& phi, int samples = 20000,
                        std::uint64_t seed = 1);

/// Row-wise norms of F (one point per row). With G non-null also writes g_m such that
/// d||F_m|| = Re sum_i conj(g_mi) dF_mi. eps smooths |u| as sqrt(|u|^2 + eps^2) and replaces
/// maxima (l_inf, max of norms) by log-sum-exp at temperature eps.
void norm_rows(const NormSpec& s, const CMat& F, RVec& N, CMat* G, double eps = 0.0);

}  // namespace interp

#endif  // INTERP_NORMS_HPP
