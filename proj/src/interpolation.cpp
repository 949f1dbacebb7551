// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace interp {

Couple make_couple(NormSpec x0, NormSpec x1) {
  if (dim(x0) != dim(x1)) throw std::invalid_argument("couple: dimension mismatch");
  return Couple{std::move(x0), std::move(x1)};
}

bool is_diagonal(const Couple& c) {
  return std::holds_alternative<WeightedLp>(c.x0.v) && std::holds_alternative<WeightedLp>(c.x1.v);
}

bool has_strict_side(const Couple& c) {
  return strict_convexity(c.x0) == Convexity::StrictlyConvex ||
         strict_convexity(c.x1) == Convexity::StrictlyConvex;
}

// ---------------------------------------------------------------------------

StripBasis::StripBasis(double theta, const SolverConfig& cfg) : theta_(theta), K_(cfg.K) {
  detail::check_theta(theta);
  if (cfg.rate_step <= 0 || cfg.rate_max < 0) throw std::invalid_argument("bad rate grid");
  grid_ = make_clustered_grid(theta, cfg.M, cfg.t_extent);
  m0_ = grid_.t[0].size();
  const Index total = m0_ + grid_.t[1].size();
  z_.reserve(std::size_t(total));
  mu_.resize(total);
  core_.assign(std::size_t(total), false);
  Index k = 0;
  for (int side = 0; side < 2; ++side)
    for (Index m = 0; m < grid_.t[side].size(); ++m, ++k) {
      const double t = grid_.t[side](m);
      z_.emplace_back(double(side), t);
      mu_(k) = grid_.w[side](m);
      core_[std::size_t(k)] = std::abs(t) <= cfg.core_t;
    }

  const int L = int(std::floor(cfg.rate_max / cfg.rate_step + 1e-9));
  rates_.resize(2 * L);
  for (int j = -L, i = 0; j <= L; ++j)
    if (j != 0) rates_(i++) = j * cfg.rate_step;

  CMat V = raw_rows(z_);
  CMat A = mu_.cwiseSqrt().cast<cplx>().asDiagonal() * V;
  Eigen::BDCSVD<CMat> svd(A, Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > cfg.svd_cut * s(0)) ++r;
  if (r == 0) throw std::runtime_error("empty strip basis");
  T_ = svd.matrixV().leftCols(r) * s.head(r).cwiseInverse().cast<cplx>().asDiagonal();
  Vw_ = V * T_;
}

CMat StripBasis::raw_rows(const std::vector<cplx>& z) const {
  CMat V(Index(z.size()), K_ + rates_.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Index r = Index(i);
    if (K_ > 0) {
      const cplx w = conformal_map(theta_, z[i]);
      cplx p = 1.0;
      for (Index k = 0; k < K_; ++k) V(r, k) = (p *= w);
    }
    const cplx s = z[i] - theta_;
    for (Index j = 0; j < rates_.size(); ++j) V(r, K_ + j) = std::exp(rates_(j) * s) - 1.0;
  }
  return V;
}

AnalyticFn StripBasis::to_fn(const CVec& x, const CMat& C) const {
  CMat R = T_ * C;
  AnalyticFn f;
  f.theta = theta_;
  f.n = x.size();
  f.disk.resize(K_ + 1, x.size());
  f.disk.row(0) = x.transpose();
  if (K_ > 0) f.disk.bottomRows(K_) = R.topRows(K_);
  f.rates = rates_;
  f.expo = R.bottomRows(rates_.size());
  return f;
}

// ---------------------------------------------------------------------------

namespace {

// Boundary norms of F = x + Vw C, side 0 on the first m0 nodes.
constexpr Index kModelNodes = 64;

class BoundaryFamily final : public NodeFamily {
 public:
  BoundaryFamily(const Couple& c, const StripBasis& b, const CVec& x, double eps)
      : c_(c), b_(b), x_(x), eps_(eps), W_(b.width()), n_(x.size()) {}

  Index size() const override { return b_.nodes(); }
  Index vars() const override { return 2 * W_ * n_; }

  CMat coefficients(const RVec& v) const {
    Eigen::Map<const Eigen::MatrixXd> re(v.data(), W_, n_), im(v.data() + W_ * n_, W_, n_);
    CMat C(W_, n_);
    C.real() = re;
    C.imag() = im;
    return C;
  }

  void values(const RVec& v, RVec& N) override {
    F_.noalias() = b_.whitened() * coefficients(v);
    F_.rowwise() += x_.transpose();
    const Index m0 = b_.side0_count(), m1 = F_.rows() - m0;
    norm_rows(c_.x0, F_.topRows(m0), N0_, &G0_, eps_);
    norm_rows(c_.x1, F_.bottomRows(m1), N1_, &G1_, eps_);
    N.resize(m0 + m1);
    N << N0_, N1_;
  }

  void pullback(const RVec& w, RVec& grad) override {
    const Index m0 = b_.side0_count(), m1 = F_.rows() - m0;
    CMat Wt(F_.rows(), n_);
    Wt.topRows(m0) = G0_.array().colwise() * w.head(m0).cast<cplx>().array();
    Wt.bottomRows(m1) = G1_.array().colwise() * w.tail(m1).cast<cplx>().array();
    CMat GC = b_.whitened().adjoint() * Wt;
    grad.resize(vars());
    Eigen::Map<Eigen::MatrixXd>(grad.data(), W_, n_) = GC.real();
    Eigen::Map<Eigen::MatrixXd>(grad.data() + W_ * n_, W_, n_) = GC.imag();
  }

  // Node Hessians by central differences of the norm gradients, reduced to their
  // complex-linear part and averaged per side; the two side averages are then
  // decoupled by a generalized eigenbasis of the side Gram matrices.
  bool build_model(const RVec& v, const RVec& alpha, const RVec& beta, const RVec& c) override {
    RVec N;
    values(v, N);
    const Index M = F_.rows(), m0 = b_.side0_count(), n = n_, R = 2 * n;
    // the side averages only need a sample of the nodes
    std::vector<Index> pick[2];
    for (int side = 0; side < 2; ++side) {
      const Index lo = side == 0 ? 0 : m0, cnt = side == 0 ? m0 : M - m0;
      const Index stride = std::max<Index>(1, cnt / kModelNodes);
      for (Index m = lo + stride / 2; m < lo + cnt; m += stride) pick[side].push_back(m);
    }
    CMat Lsum[2] = {CMat::Zero(n, n), CMat::Zero(n, n)};
    double csum[2] = {0, 0};
    Eigen::MatrixXd H(R, R);
    Eigen::VectorXd gv(R);
    for (int side = 0; side < 2; ++side) {
      const Index S = Index(pick[side].size());
      CMat P(S * 2 * R, n);
      RVec delta(S);
      for (Index k = 0; k < S; ++k) {
        const Index m = pick[side][std::size_t(k)];
        delta(k) = 1e-4 * std::max(F_.row(m).cwiseAbs().maxCoeff(), 1e-8);
        for (Index r = 0; r < R; ++r) {
          const cplx e = r < n ? cplx(delta(k), 0) : cplx(0, delta(k));
          const Index i = r % n, row = (k * R + r) * 2;
          P.row(row) = F_.row(m);
          P.row(row + 1) = F_.row(m);
          P(row, i) += e;
          P(row + 1, i) -= e;
        }
      }
      RVec Np;
      CMat Gp;
      norm_rows(side == 0 ? c_.x0 : c_.x1, P, Np, &Gp, eps_);
      for (Index k = 0; k < S; ++k) {
        const Index m = pick[side][std::size_t(k)], base = k * 2 * R;
        for (Index r = 0; r < R; ++r) {
          const auto gp = Gp.row(base + 2 * r), gm = Gp.row(base + 2 * r + 1);
          H.col(r).head(n) = (gp - gm).real().transpose() / (2 * delta(k));
          H.col(r).tail(n) = (gp - gm).imag().transpose() / (2 * delta(k));
        }
        const auto g = side == 0 ? G0_.row(m) : G1_.row(m - m0);
        gv.head(n) = g.real().transpose();
        gv.tail(n) = g.imag().transpose();
        Eigen::MatrixXd Hm = alpha(m) * 0.5 * (H + H.transpose()) + beta(m) * gv * gv.transpose();
        CMat L(n, n);
        L.real() = 0.5 * (Hm.topLeftCorner(n, n) + Hm.bottomRightCorner(n, n));
        L.imag() = 0.5 * (Hm.bottomLeftCorner(n, n) - Hm.topRightCorner(n, n));
        Lsum[side] += L;
        csum[side] += c(m);
      }
    }

    const CMat& V = b_.whitened();
    CMat Gc0 = V.topRows(m0).adjoint() * (c.head(m0).cast<cplx>().asDiagonal() * V.topRows(m0));
    CMat Gc1 = V.bottomRows(M - m0).adjoint() *
               (c.tail(M - m0).cast<cplx>().asDiagonal() * V.bottomRows(M - m0));
    CMat S = Gc0 + Gc1;
    const double sreg = 1e-10 * std::max(S.trace().real() / double(W_), 1e-300);
    S.diagonal().array() += sreg;
    Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(0.5 * (Gc0 + Gc0.adjoint()),
                                                       0.5 * (S + S.adjoint()));
    if (ges.info() != Eigen::Success) return false;
    U_ = ges.eigenvectors();
    const RVec lam = ges.eigenvalues();

    CMat Lbar[2];
    for (int j = 0; j < 2; ++j)
      Lbar[j] = csum[j] > 0 ? CMat(Lsum[j] / csum[j]) : CMat(CMat::Zero(n, n));
    const double scale =
        std::max(std::abs(Lbar[0].trace().real()), std::abs(Lbar[1].trace().real())) / double(n);
    if (!(scale > 0) || !std::isfinite(scale)) return false;
    Minv_.resize(std::size_t(W_));
    for (Index k = 0; k < W_; ++k) {
      const double l = std::clamp(lam(k), 0.0, 1.0);
      CMat Mk = l * Lbar[0] + (1 - l) * Lbar[1];
      Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (Mk + Mk.adjoint()));
      RVec ev = es.eigenvalues().cwiseMax(1e-10 * scale);
      Minv_[std::size_t(k)] =
          es.eigenvectors() * ev.cwiseInverse().cast<cplx>().asDiagonal() *
          es.eigenvectors().adjoint();
    }
    return true;
  }

  void apply_model(const RVec& g, RVec& out) override {
    CMat Rm = U_.adjoint() * coefficients(g);
    for (Index k = 0; k < W_; ++k)
      Rm.row(k) = (Minv_[std::size_t(k)] * Rm.row(k).transpose()).transpose();
    CMat D = U_ * Rm;
    out.resize(vars());
    Eigen::Map<Eigen::MatrixXd>(out.data(), W_, n_) = D.real();
    Eigen::Map<Eigen::MatrixXd>(out.data() + W_ * n_, W_, n_) = D.imag();
  }

 private:
  CMat U_;
  std::vector<CMat> Minv_;
  const Couple& c_;
  const StripBasis& b_;
  CVec x_;
  double eps_;
  Index W_, n_;
  CMat F_, G0_, G1_;
  RVec N0_, N1_;
};

double constant_scale(const Couple& c, double theta, const CVec& x) {
  const double a = norm_eval(c.x0, x), b = norm_eval(c.x1, x);
  return std::sqrt((1 - theta) * a * a + theta * b * b);
}

}  // namespace

MinimalFunction f2_minimal(const Couple& c, const StripBasis& b, const CVec& x,
                           const SolverConfig& cfg, const RVec* warm) {
  if (x.size() != c.n()) throw std::invalid_argument("dimension mismatch between couple and x");
  if (x.isZero(0.0)) throw std::invalid_argument("minimal function of the zero vector");
  const double s = constant_scale(c, b.theta(), x);
  const CVec xs = x / s;
  BoundaryFamily fam(c, b, xs, cfg.eps);
  RVec v = RVec::Zero(fam.vars());
  if (warm && warm->size() == v.size()) v = *warm;

  MinimalFunction out;
  if (cfg.precondition_energy || cfg.fallback_iter <= 0) {
    out.report = minimize_energy(fam, b.mu(), v, cfg.energy, cfg.precondition_energy);
  } else {
    LbfgsOptions plain = cfg.energy;
    plain.max_iter = std::min(plain.max_iter, cfg.fallback_iter);
    out.report = minimize_energy(fam, b.mu(), v, plain, false);
    if (!out.report.converged) {
      const SolveReport first = out.report;
      out.report = minimize_energy(fam, b.mu(), v, cfg.energy, true);
      out.report.iterations += first.iterations;
      out.report.evaluations += first.evaluations;
    }
  }
  out.report.seed = cfg.seed;
  out.energy = std::sqrt(std::max(0.0, out.report.objective)) * s;
  out.theta = b.theta();
  out.x = x;
  out.unique = has_strict_side(c);
  out.state = v;
  out.fn = b.to_fn(x, fam.coefficients(v) * s);
  RVec N;
  fam.values(v, N);
  out.side_norms = N * s;
  return out;
}

MinimalFunction f2_minimal(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg) {
  StripBasis b(theta, cfg);
  return f2_minimal(c, b, x, cfg);
}

NormResult calderon_norm(const Couple& c, const StripBasis& b, const CVec& x,
                         const SolverConfig& cfg) {
  if (x.size() != c.n()) throw std::invalid_argument("dimension mismatch between couple and x");
  NormResult res;
  if (x.isZero(0.0)) {
    res.report.converged = true;
    return res;
  }
  SolverConfig wcfg = cfg;
  wcfg.energy = cfg.warm;
  MinimalFunction f = f2_minimal(c, b, x, wcfg);
  const double s = constant_scale(c, b.theta(), x);
  BoundaryFamily fam(c, b, x / s, cfg.eps);
  RVec v = f.state;
  MinimaxResult mm = minimize_minimax(fam, b.mu(), b.core(), v, cfg.minimax);
  res.value = mm.report.objective * s;
  res.energy = f.energy;
  res.report = mm.report;
  res.report.objective = res.value;
  res.report.converged = mm.report.grad_norm <= cfg.minimax_tol;
  res.report.seed = cfg.seed;
  f.fn = b.to_fn(x, fam.coefficients(v) * s);
  f.state = v;
  RVec N;
  fam.values(v, N);
  f.side_norms = N * s;
  res.fn = std::move(f);
  return res;
}

NormResult calderon_norm(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg) {
  StripBasis b(theta, cfg);
  return calderon_norm(c, b, x, cfg);
}

double theta_norm(const Couple& c, const StripBasis& b, const CVec& x, const SolverConfig& cfg,
                  ThetaNorm mode) {
  if (x.isZero(0.0)) return 0.0;
  if (mode == ThetaNorm::Calderon) return calderon_norm(c, b, x, cfg).value;
  return f2_minimal(c, b, x, cfg).energy;
}

std::unique_ptr<NodeFamily> boundary_family(const Couple& c, const StripBasis& b, const CVec& x,
                                            const SolverConfig& cfg) {
  if (x.size() != c.n()) throw std::invalid_argument("dimension mismatch between couple and x");
  return std::make_unique<BoundaryFamily>(c, b, x, cfg.eps);
}

double boundary_flatness(const MinimalFunction& f, const StripBasis& b) {
  double wsum = 0, mean = 0;
  for (Index m = 0; m < b.nodes(); ++m)
    if (b.core()[std::size_t(m)]) {
      wsum += b.mu()(m);
      mean += b.mu()(m) * f.side_norms(m);
    }
  mean /= wsum;
  double var = 0;
  for (Index m = 0; m < b.nodes(); ++m)
    if (b.core()[std::size_t(m)]) var += b.mu()(m) * std::pow(f.side_norms(m) - mean, 2);
  return std::sqrt(var / wsum) / mean;
}

// ---------------------------------------------------------------------------

KResult k_functional(const Couple& c, const CVec& x, double t, const LbfgsOptions& opt) {
  if (!(t > 0)) throw std::invalid_argument("K-functional needs t > 0");
  if (x.size() != c.n()) throw std::invalid_argument("dimension mismatch between couple and x");
  const Index n = x.size();
  KResult best;
  const double n0 = norm_eval(c.x0, x), n1 = norm_eval(c.x1, x);
  best.value = n0;
  best.x1 = CVec::Zero(n);
  if (t * n1 < best.value) {
    best.value = t * n1;
    best.x1 = x;
  }
  best.report.converged = true;
  best.report.objective = best.value;
  if (x.isZero(0.0)) return best;

  const double s = n0;
  const CVec xs = x / s;
  auto exact = [&](const CVec& y) { return norm_eval(c.x0, xs - y) + t * norm_eval(c.x1, y); };
  auto unpack = [n](const RVec& v) {
    CVec y(n);
    y.real() = v.head(n);
    y.imag() = v.tail(n);
    return y;
  };

  for (double start : {0.5, 0.1, 0.9}) {
    RVec v(2 * n);
    v << (start * xs).real(), (start * xs).imag();
    SolveReport rep;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-6, 1e-9}) {
      Objective<double> f = [&](const RVec& vv, RVec& g) {
        CVec y = unpack(vv);
        RVec N0, N1;
        CMat G0, G1;
        norm_rows(c.x0, (xs - y).transpose(), N0, &G0, eps);
        norm_rows(c.x1, y.transpose(), N1, &G1, eps);
        CVec gc = -G0.row(0).transpose() + t * G1.row(0).transpose();
        g.resize(2 * n);
        g << gc.real(), gc.imag();
        return N0(0) + t * N1(0);
      };
      rep = minimize_smooth(f, v, opt);
    }
    CVec y = unpack(v);
    const double val = exact(y) * s;
    if (val < best.value) {
      best.value = val;
      best.x1 = y * s;
      best.report = rep;
      best.report.objective = val;
      // kinks of non-smooth norms stall the gradient; the smoothing ladder bounds the error
      best.report.converged = true;
    }
  }
  return best;
}

double gagliardo_norm(const Couple& c, const CVec& x, int side) {
  if (side != 0 && side != 1) throw std::invalid_argument("side must be 0 or 1");
  double sup = 0;
  for (int k = -20; k <= 20; ++k) {
    const double t = std::ldexp(1.0, k);
    const double K = k_functional(c, x, t).value;
    sup = std::max(sup, side == 0 ? K : K / t);
  }
  return sup;
}

CVec omega(const Couple& c, const StripBasis& b, const CVec& x, int order,
           const SolverConfig& cfg) {
  if (order < 1) throw std::invalid_argument("omega order must be >= 1");
  // minimal functions of the F^2 problem scale linearly with x
  return taylor_coeff(f2_minimal(c, b, x, cfg).fn, order);
}

// ---------------------------------------------------------------------------

double richardson(const std::vector<double>& f, double* err) {
  if (f.size() < 3) throw std::invalid_argument("richardson needs at least three samples");
  std::vector<double> r0 = f, r1(f.size()), r2(f.size());
  for (std::size_t k = 1; k < f.size(); ++k) r1[k] = r0[k] + (r0[k] - r0[k - 1]) / 1.0;
  for (std::size_t k = 2; k < f.size(); ++k) r2[k] = r1[k] + (r1[k] - r1[k - 1]) / 3.0;
  if (err) *err = std::abs(r2.back() - r1.back());
  return r2.back();
}

NormPath norm_path(const Couple& c, const CVec& x, const std::vector<double>& grid,
                   const SolverConfig& cfg, int k_max) {
  NormPath path;
  for (double th : grid) {
    StripBasis b(th, cfg);
    NormResult r = calderon_norm(c, b, x, cfg);
    path.points.push_back({th, r.value, r.energy, r.report.converged});
    path.converged = path.converged && r.report.converged;
  }
  for (std::size_t i = 1; i + 1 < path.points.size(); ++i) {
    const auto &a = path.points[i - 1], &m = path.points[i], &z = path.points[i + 1];
    if (a.value <= 0 || m.value <= 0 || z.value <= 0) continue;
    const double chord = ((z.theta - m.theta) * std::log(a.value) +
                          (m.theta - a.theta) * std::log(z.value)) /
                         (z.theta - a.theta);
    path.convexity_slack = std::max(path.convexity_slack, std::log(m.value) - chord);
  }

  std::vector<double> near1, near0;
  for (int k = 2; k <= k_max; ++k) {
    const double h = std::ldexp(1.0, -k);
    StripBasis b1(1 - h, cfg), b0(h, cfg);
    near1.push_back(calderon_norm(c, b1, x, cfg).value);
    near0.push_back(calderon_norm(c, b0, x, cfg).value);
  }
  path.limit1 = richardson(near1, &path.extrapolation_err1);
  path.limit0 = richardson(near0, &path.extrapolation_err0);
  path.gap1 = std::abs(path.limit1 - norm_eval(c.x1, x));
  path.gap0 = std::abs(path.limit0 - norm_eval(c.x0, x));
  return path;
}

}  // namespace interp
