// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_ORACLES_HPP
#define INTERP_ORACLES_HPP

#include "interp/interpolation.hpp"

namespace interp {

/// Diagonal couple (weighted l_p0, weighted l_p1); weights default to ones.
struct LpCoupleSpec {
  double p0 = 2, p1 = 2;
  RVec w0, w1;
};

LpCoupleSpec lp_couple_spec(double p0, double p1, Index n);
LpCoupleSpec lp_couple_spec(const Couple& c);  // throws unless diagonal
Couple to_couple(const LpCoupleSpec& s);

/// 1/p_theta = (1-theta)/p0 + theta/p1
double theta_exponent(const LpCoupleSpec& s, double theta);
/// Rate of the vertical phase: p_theta (1/p1 - 1/p0).
double vertical_rate(const LpCoupleSpec& s, double theta);
/// Weights of X_theta as a weighted l_{p_theta} norm.
NormSpec lp_theta_norm(const LpCoupleSpec& s, double theta);

double lp_interpolation_norm(const LpCoupleSpec& s, double theta, const CVec& x);
/// Minimal function through x (homogeneous extension for non-unit x), evaluated at z.
CVec lp_minimal_function(const LpCoupleSpec& s, double theta, const CVec& x, const cplx& z);
/// First Taylor coefficient at theta of lp_minimal_function.
CVec lp_omega(const LpCoupleSpec& s, double theta, const CVec& x);
/// Frequencies w_n of the vertical orbit: F(theta + i t)_n = x_n exp(i w_n t).
RVec lp_vertical_frequencies(const LpCoupleSpec& s, double theta, const CVec& x);

struct BruteForceK {
  double value = 0;
  double error_bound = 0;
};
/// Zooming lattice minimisation of ||x - y||_0 + t ||y||_1 over y; n <= 2.
BruteForceK brute_force_k_functional(const Couple& c, const CVec& x, double t, int density = 21,
                                     int levels = 14);

}  // namespace interp

#endif  // INTERP_ORACLES_HPP
