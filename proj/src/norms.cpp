// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace interp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void lp_rows(const WeightedLp& s, const CMat& F, RVec& N, CMat* G, double eps) {
  const Index m = F.rows(), n = F.cols();
  N.resize(m);
  if (G) G->resize(m, n);
  const Eigen::ArrayXXd a2 = F.cwiseAbs2().array() + eps * eps;

  if (std::isinf(s.p)) {
    Eigen::ArrayXd best = Eigen::ArrayXd::Constant(m, -1.0);
    Eigen::ArrayXi arg = Eigen::ArrayXi::Zero(m);
    for (Index j = 0; j < n; ++j) {
      const Eigen::ArrayXd wa = s.w(j) * a2.col(j).sqrt();
      for (Index r = 0; r < m; ++r)
        if (wa(r) > best(r)) best(r) = wa(r), arg(r) = int(j);
    }
    if (eps > 0) {
      // log-sum-exp at temperature eps: within eps log n of the largest entry
      if (G) G->setZero();
      for (Index r = 0; r < m; ++r) {
        const double top = best(r);
        double S = 0;
        for (Index j = 0; j < n; ++j) S += std::exp((s.w(j) * std::sqrt(a2(r, j)) - top) / eps);
        N(r) = top + eps * std::log(S);
        if (G)
          for (Index j = 0; j < n; ++j) {
            const double a = std::sqrt(a2(r, j));
            (*G)(r, j) = std::exp((s.w(j) * a - top) / eps) / S * s.w(j) * F(r, j) / a;
          }
      }
      return;
    }
    N = best.matrix();
    if (G) {
      G->setZero();
      for (Index r = 0; r < m; ++r) {
        const Index j = arg(r);
        if (N(r) > 0) (*G)(r, j) = s.w(j) * F(r, j) / std::sqrt(a2(r, j));
      }
    }
    return;
  }

  // scale each row by its largest modulus so large p neither overflows nor underflows
  Eigen::ArrayXd amax2 = a2.col(0);
  for (Index j = 1; j < n; ++j) amax2 = amax2.max(a2.col(j));
  const Eigen::ArrayXd lam = (amax2 > 0).select(amax2.log(), 0.0);
  const double h = 0.5 * s.p;
  Eigen::ArrayXXd rp(m, n);
  if (s.p == 2.0)
    rp = a2.colwise() / amax2.max(1e-300);
  else {
    rp = a2.max(1e-300).log();
    rp.colwise() -= lam;
    rp = (h * rp).exp();
  }
  Eigen::ArrayXd S = Eigen::ArrayXd::Zero(m);
  for (Index j = 0; j < n; ++j) S += s.w(j) * rp.col(j);
  const Eigen::ArrayXd amax = amax2.sqrt();
  const Eigen::ArrayXd lS = S.max(1e-300).log();
  N = (amax * (lS / s.p).exp()).matrix();
  if (!G) return;

  // g_i = w_i r_i^(p-2) S^(1/p - 1) u_i / amax
  const Eigen::ArrayXd rowc = (lS * (1.0 / s.p - 1.0)).exp() * amax;
  for (Index j = 0; j < n; ++j) {
    const Eigen::ArrayXd coef = s.w(j) * rowc * rp.col(j) / a2.col(j).max(1e-300);
    G->col(j) = coef.matrix().asDiagonal() * F.col(j);
  }
}

void quadratic_rows(const Quadratic& s, const CMat& F, RVec& N, CMat* G, double eps) {
  CMat Y = F * s.A.transpose();
  Eigen::ArrayXd q = (F.conjugate().array() * Y.array()).rowwise().sum().real();
  N = (q.max(0.0) + eps * eps).sqrt().matrix();
  if (G) {
    Eigen::ArrayXd inv = (N.array() > 0).select(N.array().inverse(), 0.0);
    *G = (Y.array().colwise() * inv.cast<cplx>()).matrix();
  }
}

void check_dim(const NormSpec& s, Index n) {
  if (dim(s) != n) throw std::invalid_argument("dimension mismatch between norm and vector");
}

}  // namespace

NormSpec weighted_lp(double p, const RVec& w) {
  if (!(p >= 1.0)) throw std::invalid_argument("weighted_lp: p must be >= 1");
  if (w.size() == 0) throw std::invalid_argument("weighted_lp: empty weights");
  if (!(w.array() > 0).all() || !w.allFinite())
    throw std::invalid_argument("weighted_lp: weights must be positive");
  return NormSpec{WeightedLp{p, w}};
}

NormSpec lp_norm(double p, Index n) { return weighted_lp(p, RVec::Ones(n)); }

NormSpec quadratic(const CMat& A) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw std::invalid_argument("quadratic: matrix must be square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("quadratic: matrix must be Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0))
    throw std::invalid_argument("quadratic: matrix must be positive definite");
  CMat H = 0.5 * (A + A.adjoint());
  return NormSpec{Quadratic{H}};
}

NormSpec max_of(std::vector<NormSpec> of) {
  if (of.empty()) throw std::invalid_argument("max: empty list");
  const Index n = dim(of.front());
  for (const auto& s : of)
    if (dim(s) != n) throw std::invalid_argument("max: dimension mismatch");
  return NormSpec{MaxOf{std::move(of)}};
}

NormSpec scaled(double c, const NormSpec& inner) {
  if (!(c > 0) || !std::isfinite(c)) throw std::invalid_argument("scaled: c must be positive");
  return NormSpec{Scaled{c, std::make_shared<const NormSpec>(inner)}};
}

Index dim(const NormSpec& s) {
  return std::visit(overloaded{[](const WeightedLp& a) { return Index(a.w.size()); },
                               [](const Quadratic& a) { return Index(a.A.rows()); },
                               [](const MaxOf& a) { return dim(a.of.front()); },
                               [](const Scaled& a) { return dim(*a.inner); }},
                    s.v);
}

Convexity strict_convexity(const NormSpec& s) {
  return std::visit(
      overloaded{[](const WeightedLp& a) {
                   return (a.p > 1.0 && std::isfinite(a.p)) ? Convexity::StrictlyConvex
                                                             : Convexity::Unknown;
                 },
                 [](const Quadratic&) { return Convexity::StrictlyConvex; },
                 [](const MaxOf&) { return Convexity::Unknown; },
                 [](const Scaled& a) { return strict_convexity(*a.inner); }},
      s.v);
}

bool is_smooth(const NormSpec& s) {
  return std::visit(
      overloaded{[](const WeightedLp& a) { return a.p > 1.0 && std::isfinite(a.p); },
                 [](const Quadratic&) { return true; }, [](const MaxOf&) { return false; },
                 [](const Scaled& a) { return is_smooth(*a.inner); }},
      s.v);
}

RVec lp_scale(const WeightedLp& s) {
  if (std::isinf(s.p)) return s.w;
  return s.w.array().pow(1.0 / s.p).matrix();
}

void norm_rows(const NormSpec& s, const CMat& F, RVec& N, CMat* G, double eps) {
  std::visit(overloaded{[&](const WeightedLp& a) { lp_rows(a, F, N, G, eps); },
                        [&](const Quadratic& a) { quadratic_rows(a, F, N, G, eps); },
                        [&](const MaxOf& a) {
                          const std::size_t K = a.of.size();
                          std::vector<RVec> Nk(K);
                          std::vector<CMat> Gk(K);
                          for (std::size_t k = 0; k < K; ++k) norm_rows(a.of[k], F, Nk[k], G ? &Gk[k] : nullptr, eps);
                          N = Nk[0];
                          for (std::size_t k = 1; k < K; ++k) N = N.cwiseMax(Nk[k]);
                          if (eps > 0) {
                            // log-sum-exp at temperature eps, as for l_inf
                            RVec S = RVec::Zero(F.rows());
                            for (std::size_t k = 0; k < K; ++k) S.array() += ((Nk[k] - N).array() / eps).exp();
                            if (G) {
                              G->setZero(F.rows(), F.cols());
                              for (std::size_t k = 0; k < K; ++k) {
                                const RVec wk = ((Nk[k] - N).array() / eps).exp() / S.array();
                                *G += wk.cast<cplx>().asDiagonal() * Gk[k];
                              }
                            }
                            N.array() += eps * S.array().log();
                            return;
                          }
                          if (G) {
                            *G = Gk[0];
                            for (Index r = 0; r < F.rows(); ++r)
                              for (std::size_t k = 1; k < K; ++k)
                                if (Nk[k](r) >= N(r)) G->row(r) = Gk[k].row(r);
                          }
                        },
                        [&](const Scaled& a) {
                          norm_rows(*a.inner, F, N, G, eps);
                          N *= a.c;
                          if (G) *G *= a.c;
                        }},
             s.v);
}

double norm_eval(const NormSpec& s, const CVec& x) {
  check_dim(s, x.size());
  RVec N;
  norm_rows(s, x.transpose(), N, nullptr, 0.0);
  return N(0);
}

CVec norming_functional(const NormSpec& s, const CVec& x) {
  check_dim(s, x.size());
  if (!is_smooth(s)) throw std::domain_error("norming functional needs a smooth strictly convex norm");
  if (x.isZero(0.0)) throw std::invalid_argument("norming functional of the zero vector");
  RVec N;
  CMat G;
  norm_rows(s, x.transpose(), N, &G, 0.0);
  return G.row(0).conjugate().transpose();
}

double dual_norm_eval(const NormSpec& s, const CVec& phi) {
  check_dim(s, phi.size());
  return std::visit(
      overloaded{[&](const WeightedLp& a) {
                   Eigen::ArrayXd u = phi.cwiseAbs().array() / lp_scale(a).array();
                   if (a.p == 1.0) return u.maxCoeff();
                   if (std::isinf(a.p)) return u.sum();
                   const double q = a.p / (a.p - 1.0);
                   const double m = u.maxCoeff();
                   if (m == 0) return 0.0;
                   return m * std::pow((u / m).pow(q).sum(), 1.0 / q);
                 },
                 [&](const Quadratic& a) {
                   CVec psi = phi.conjugate();
                   return std::sqrt(std::max(0.0, psi.dot(a.A.ldlt().solve(psi)).real()));
                 },
                 [&](const MaxOf&) {
                   if (phi.size() > 3) throw std::domain_error("dual of max-norm needs n <= 3");
                   return dual_norm_search(s, phi);
                 },
                 [&](const Scaled& a) { return dual_norm_eval(*a.inner, phi) / a.c; }},
      s.v);
}

double dual_norm_search(const NormSpec& s, const CVec& phi, int samples, std::uint64_t seed) {
  const Index n = phi.size();
  check_dim(s, n);
  if (n > 3) throw std::domain_error("dual norm search supports n <= 3");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto draw = [&] {
    CVec x(n);
    for (Index i = 0; i < n; ++i) x(i) = cplx(gauss(rng), gauss(rng));
    return x;
  };
  auto ratio = [&](const CVec& x) {
    const double nx = norm_eval(s, x);
    return nx > 0 ? std::abs(pairing(phi, x)) / nx : 0.0;
  };

  std::vector<std::pair<double, CVec>> best;
  for (int k = 0; k < samples; ++k) {
    CVec x = draw();
    best.emplace_back(ratio(x), x);
  }
  std::partial_sort(best.begin(), best.begin() + std::min<std::size_t>(8, best.size()), best.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  best.resize(std::min<std::size_t>(8, best.size()));

  double top = 0;
  for (auto& [val, x] : best) {
    x /= x.norm();
    double step = 0.3;
    for (int round = 0; round < 80; ++round) {
      bool moved = false;
      for (int trial = 0; trial < 30; ++trial) {
        CVec y = x + step * draw();
        y /= y.norm();
        const double v = ratio(y);
        if (v > val) {
          val = v;
          x = y;
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
      if (step < 1e-7) break;
    }
    top = std::max(top, val);
  }
  return top;
}

}  // namespace interp
