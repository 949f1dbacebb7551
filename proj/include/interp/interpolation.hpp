// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_INTERPOLATION_HPP
#define INTERP_INTERPOLATION_HPP

#include <memory>
#include <optional>
#include <vector>

#include "interp/norms.hpp"
#include "interp/solver.hpp"
#include "interp/strip.hpp"

namespace interp {

struct Couple {
  NormSpec x0, x1;
  Index n() const { return dim(x0); }
};

Couple make_couple(NormSpec x0, NormSpec x1);
/// Both sides are weighted lp norms.
bool is_diagonal(const Couple& c);
/// Uniqueness of minimal functions: one side strictly convex.
bool has_strict_side(const Couple& c);

struct SolverConfig {
  Index K = 0;              // degree of the disk-series part
  Index M = 512;            // boundary nodes per side
  double rate_max = 10.0;   // exponential rates in [-rate_max, rate_max] \ {0}
  double rate_step = 0.5;
  double t_extent = 6.0;    // outermost node height
  double core_t = 3.0;      // sups are read on |t| <= core_t
  double svd_cut = 1e-9;
  double eps = 1e-9;        // modulus smoothing inside the norms
  LbfgsOptions energy{1e-10, 4000, 20, 1e-16, 20, 1e-7};
  bool precondition_energy = false;
  int fallback_iter = 1000;  // plain F^2 iterations before the preconditioned restart; 0 disables
  LbfgsOptions warm{1e-10, 4000, 20, 1e-16, 20, 1e-7};  // F^2 stage ahead of the minimax
  MinimaxOptions minimax{};
  double minimax_tol = 1e-4;   // gradient of the last smoothing stage
  std::uint64_t seed = 0;
};

/// Discretised strip at a fixed base point: clustered boundary grid, raw basis
/// columns [m^1..m^K, exp(rate (z - theta)) - 1] at the nodes, and a whitening
/// map T making V*T orthonormal for the harmonic measure.
class StripBasis {
 public:
  StripBasis(double theta, const SolverConfig& cfg);

  double theta() const { return theta_; }
  Index K() const { return K_; }
  const RVec& rates() const { return rates_; }
  const BoundaryGrid& grid() const { return grid_; }
  Index side0_count() const { return m0_; }
  Index nodes() const { return Index(z_.size()); }
  const std::vector<cplx>& z() const { return z_; }
  const RVec& mu() const { return mu_; }
  const std::vector<bool>& core() const { return core_; }
  const CMat& whitened() const { return Vw_; }
  const CMat& whitening() const { return T_; }
  Index width() const { return Vw_.cols(); }

  /// Raw basis columns at arbitrary points, one row per point.
  CMat raw_rows(const std::vector<cplx>& z) const;
  /// AnalyticFn with F(theta) = x from whitened coefficients C (width x n).
  AnalyticFn to_fn(const CVec& x, const CMat& C) const;

 private:
  double theta_;
  Index K_;
  RVec rates_;
  BoundaryGrid grid_;
  Index m0_ = 0;
  std::vector<cplx> z_;
  RVec mu_;
  std::vector<bool> core_;
  CMat Vw_, T_;
};

struct MinimalFunction {
  AnalyticFn fn;
  double energy = 0;        // (sum_j int ||F||_j^2 dmu^j)^(1/2)
  double theta = 0.5;
  CVec x;
  SolveReport report;
  bool unique = true;
  RVec state;               // whitened coefficients, reusable as a warm start
  RVec side_norms;          // ||F(node)||_j over all nodes
};

struct NormResult {
  double value = 0;         // minimax value, the canonical ||x||_theta
  double energy = 0;        // F^2 quotient value
  SolveReport report;
  std::optional<MinimalFunction> fn;
};

MinimalFunction f2_minimal(const Couple& c, const StripBasis& b, const CVec& x,
                           const SolverConfig& cfg, const RVec* warm = nullptr);
MinimalFunction f2_minimal(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg);

NormResult calderon_norm(const Couple& c, const StripBasis& b, const CVec& x,
                         const SolverConfig& cfg);
NormResult calderon_norm(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg);

/// Norm of X_theta used for distances: minimax value or the cheaper F^2 quotient value.
enum class ThetaNorm { Calderon, Energy };
double theta_norm(const Couple& c, const StripBasis& b, const CVec& x, const SolverConfig& cfg,
                  ThetaNorm mode);

/// Boundary norms of x + Vw C at the nodes of b, over real-packed whitened coefficients C.
std::unique_ptr<NodeFamily> boundary_family(const Couple& c, const StripBasis& b, const CVec& x,
                                            const SolverConfig& cfg);

/// Weighted standard deviation of the side-wise boundary norms over core nodes.
double boundary_flatness(const MinimalFunction& f, const StripBasis& b);

struct KResult {
  double value = 0;
  CVec x1;
  SolveReport report;
};
KResult k_functional(const Couple& c, const CVec& x, double t, const LbfgsOptions& opt = {});

/// sup_t K(x,t) (side 0) or sup_t K(x,t)/t (side 1) on t = 2^-20 .. 2^20.
double gagliardo_norm(const Couple& c, const CVec& x, int side);

/// Order-th Taylor coefficient at theta of the minimal function through x.
CVec omega(const Couple& c, const StripBasis& b, const CVec& x, int order,
           const SolverConfig& cfg);

struct PathPoint {
  double theta;
  double value;
  double energy;
  bool converged;
};

struct NormPath {
  std::vector<PathPoint> points;
  double limit0 = 0, limit1 = 0;  // extrapolated s -> 0 and s -> 1
  double gap0 = 0, gap1 = 0;      // distance to ||x||_0, ||x||_1
  double extrapolation_err0 = 0, extrapolation_err1 = 0;
  double convexity_slack = 0;     // max over consecutive triples of the midpoint excess of log ||x||
  bool converged = true;
};

NormPath norm_path(const Couple& c, const CVec& x, const std::vector<double>& grid,
                   const SolverConfig& cfg, int k_max = 6);

/// Richardson extrapolation to h = 0 for samples at h_k = 2^-k (halving steps), order 2.
double richardson(const std::vector<double>& f, double* err = nullptr);

}  // namespace interp

#endif  // INTERP_INTERPOLATION_HPP
