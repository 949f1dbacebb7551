// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/spheres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>

#include "interp/dynamics.hpp"
#include "interp/oracles.hpp"

namespace interp {

namespace {

// strip bases keyed by base point, built on first use
class BasisCache {
 public:
  explicit BasisCache(const SolverConfig& cfg) : cfg_(cfg) {}
  const StripBasis& at(double theta) {
    auto it = cache_.find(theta);
    if (it == cache_.end())
      it = cache_.emplace(theta, std::make_unique<StripBasis>(theta, cfg_)).first;
    return *it->second;
  }

 private:
  SolverConfig cfg_;
  std::map<double, std::unique_ptr<StripBasis>> cache_;
};

double distance_with(const Couple& c, const StripBasis* b, double theta, const CVec& v,
                     DistanceMode mode, const SolverConfig& cfg) {
  if (v.isZero(0.0)) return 0.0;
  if (mode == DistanceMode::Auto && is_diagonal(c))
    return lp_interpolation_norm(lp_couple_spec(c), theta, v);
  const ThetaNorm tm = mode == DistanceMode::Calderon ? ThetaNorm::Calderon : ThetaNorm::Energy;
  if (b) return theta_norm(c, *b, v, cfg, tm);
  StripBasis own(theta, cfg);
  return theta_norm(c, own, v, cfg, tm);
}

// classical lower bound for the modulus of convexity of l_p
double lp_convexity_bound(double p, double e) {
  if (std::isinf(p)) return 0.0;
  if (p <= 2) return (p - 1) * e * e / 8;
  return std::pow(e, p) / (p * std::pow(2.0, p));
}

double energy_distance(const StripBasis& b, const Couple& c, const AnalyticFn& f,
                       const AnalyticFn& g) {
  const CMat D = eval_many(f, b.z()) - eval_many(g, b.z());
  const Index m0 = b.side0_count(), m1 = D.rows() - m0;
  RVec N0, N1;
  norm_rows(c.x0, D.topRows(m0), N0, nullptr, 0.0);
  norm_rows(c.x1, D.bottomRows(m1), N1, nullptr, 0.0);
  return std::sqrt(b.mu().head(m0).dot(N0.cwiseAbs2()) + b.mu().tail(m1).dot(N1.cwiseAbs2()));
}

// alpha table from (domain distance, image distance) samples
std::vector<ModulusRow> alpha_table(const std::vector<std::pair<double, double>>& d, double s,
                                    double t, const std::vector<double>& eps_grid) {
  std::vector<ModulusRow> rows;
  double dmax = 0;
  for (const auto& [a, b] : d) dmax = std::max(dmax, a);
  for (double e : eps_grid) {
    ModulusRow r;
    r.s = s, r.t = t, r.eps = e, r.n_pairs = int(d.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : d)
      if (b >= e) best = std::min(best, a);
    if (std::isinf(best)) {
      r.censored = true;
      best = dmax;
    }
    r.alpha_hat = best;
    rows.push_back(r);
  }
  return rows;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32)};
  std::uint32_t w[2];
  seq.generate(w, w + 2);
  return (std::uint64_t(w[0]) << 32) | w[1];
}

void check_probe(const ProbeOptions& opt) {
  if (opt.n_pairs < 1) throw std::invalid_argument("n_pairs must be positive");
  if (opt.eps_grid.empty()) throw std::invalid_argument("empty eps grid");
  for (double e : opt.eps_grid)
    if (!(e > 0)) throw std::invalid_argument("eps values must be positive");
}

std::vector<SpherePair> sample_pairs_seeded(const Couple& c, double s, const ProbeOptions& opt,
                                            const SolverConfig& cfg, std::uint64_t seed,
                                            const StripBasis* b) {
  check_probe(opt);
  const Index n = c.n();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto draw = [&] {
    CVec v(n);
    for (Index i = 0; i < n; ++i) {
      const double re = gauss(rng);
      v(i) = cplx(re, gauss(rng));
    }
    return v;
  };
  auto unit = [&](CVec v) {
    const double nv = distance_with(c, b, s, v, opt.distance, cfg);
    return CVec(v / nv);
  };
  const auto [emin, emax] = std::minmax_element(opt.eps_grid.begin(), opt.eps_grid.end());
  const double lo = *emin / 4, hi = 2 * *emax;
  std::vector<SpherePair> out;
  out.reserve(std::size_t(opt.n_pairs));
  for (int k = 0; k < opt.n_pairs; ++k) {
    const double r = lo * std::pow(hi / lo, (k + 0.5) / opt.n_pairs);
    const CVec x = unit(draw());
    const CVec g = unit(draw());
    out.push_back({x, unit(x + r * g)});
  }
  return out;
}

}  // namespace

CVec daher_map(const Couple& c, const StripBasis& b, double theta_prime, const CVec& x,
               const SolverConfig& cfg) {
  if (!(theta_prime > 0 && theta_prime < 1)) throw std::invalid_argument("theta' must lie in (0,1)");
  if (x.isZero(0.0)) return x;
  if (theta_prime == b.theta()) return x;
  return eval(f2_minimal(c, b, x, cfg).fn, cplx(theta_prime, 0));
}

CVec daher_map(const Couple& c, double theta, double theta_prime, const CVec& x,
               const SolverConfig& cfg) {
  StripBasis b(theta, cfg);
  return daher_map(c, b, theta_prime, x, cfg);
}

MazurLimitResult limit_mazur(const Couple& c, double theta, const CVec& x, const SolverConfig& cfg,
                             int k_max, double tol) {
  if (k_max < 4) throw std::invalid_argument("k_max must be at least 4");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  MazurLimitResult res;
  res.x = x;
  const Index n = x.size();
  if (x.isZero(0.0)) {
    res.limit = x;
    res.note = "zero vector";
    return res;
  }
  const MinimalFunction f = f2_minimal(c, theta, x, cfg);
  res.converged = f.report.converged;
  std::vector<CVec> vals;
  for (int k = 2; k <= k_max; ++k) {
    const double s = 1 - std::ldexp(1.0, -k);
    vals.push_back(eval(f.fn, cplx(s, 0)));
    res.s.push_back(s);
    res.side1_norms.push_back(norm_eval(c.x1, vals.back()));
  }
  res.limit = CVec(n);
  double err = 0;
  for (Index i = 0; i < n; ++i) {
    std::vector<double> re, im;
    for (const auto& v : vals) re.push_back(v(i).real()), im.push_back(v(i).imag());
    double er = 0, ei = 0;
    res.limit(i) = cplx(richardson(re, &er), richardson(im, &ei));
    err = std::max({err, er, ei});
  }
  res.extrapolation_err = err;
  res.limit_norm = norm_eval(c.x1, res.limit);
  res.gap = std::abs(res.limit_norm - 1);
  // residual growth: the last correction must not exceed the spread of the samples
  double spread = 0;
  for (const auto& v : vals) spread = std::max(spread, (v - vals.back()).norm());
  const bool divergent = !res.limit.allFinite() || err > std::max(spread, tol);
  if (divergent) res.note = "divergent extrapolation";
  res.in_delta = !divergent && res.gap <= tol;
  return res;
}

SphereMap solver_sphere_map(const Couple& c, const SolverConfig& cfg) {
  auto cache = std::make_shared<BasisCache>(cfg);
  return [c, cfg, cache](double from, double to, const CVec& x) {
    return daher_map(c, cache->at(from), to, x, cfg);
  };
}

const char* verdict_name(ModulusReport::Verdict v) {
  switch (v) {
    case ModulusReport::Verdict::UniformAcrossGrid:
      return "UniformAcrossGrid";
    case ModulusReport::Verdict::Degrading:
      return "Degrading";
    case ModulusReport::Verdict::Inconclusive:
      return "Inconclusive";
    case ModulusReport::Verdict::None:
      return "None";
  }
  return "None";
}

std::vector<SpherePair> sample_pairs(const Couple& c, double s, const ProbeOptions& opt,
                                     const SolverConfig& cfg) {
  return sample_pairs_seeded(c, s, opt, cfg, stream_seed(opt.seed, 0), nullptr);
}

double sphere_distance(const Couple& c, double theta, const CVec& v, DistanceMode mode,
                       const SolverConfig& cfg) {
  return distance_with(c, nullptr, theta, v, mode, cfg);
}

ModulusReport modulus_probe(const Couple& c, double theta, double theta_prime,
                            const ProbeOptions& opt, const SolverConfig& cfg,
                            const SphereMap& map) {
  check_probe(opt);
  if (!(theta > 0 && theta < 1 && theta_prime > 0 && theta_prime < 1))
    throw std::invalid_argument("base points must lie in (0,1)");
  ModulusReport rep;
  rep.kind = "modulus";
  rep.theta = theta;
  rep.theta_prime = theta_prime;
  rep.eps_grid = opt.eps_grid;
  rep.n_pairs = opt.n_pairs;
  rep.seed = opt.seed;
  BasisCache cache(cfg);
  const bool diagonal = is_diagonal(c);
  const bool exact_distance = opt.distance == DistanceMode::Auto && diagonal;

  for (int dir = 0; dir < 2; ++dir) {
    const double from = dir == 0 ? theta : theta_prime, to = dir == 0 ? theta_prime : theta;
    const StripBasis* bf = exact_distance ? nullptr : &cache.at(from);
    const StripBasis* bt = exact_distance ? nullptr : &cache.at(to);
    const auto pairs = sample_pairs_seeded(c, from, opt, cfg, stream_seed(opt.seed, std::uint64_t(dir)), bf);
    std::vector<std::pair<double, double>> d;
    d.reserve(pairs.size());
    for (const auto& pr : pairs) {
      CVec fx, fy;
      if (map) {
        fx = map(from, to, pr.x);
        fy = map(from, to, pr.y);
      } else {
        const StripBasis& b = cache.at(from);
        const MinimalFunction mx = f2_minimal(c, b, pr.x, cfg), my = f2_minimal(c, b, pr.y, cfg);
        rep.converged = rep.converged && mx.report.converged && my.report.converged;
        fx = eval(mx.fn, cplx(to, 0));
        fy = eval(my.fn, cplx(to, 0));
        if (dir == 0 && diagonal) {
          const LpCoupleSpec s = lp_couple_spec(c);
          const double e = 0.5 * energy_distance(b, c, mx.fn, my.fn);
          const double delta = std::min({lp_convexity_bound(s.p0, e), lp_convexity_bound(s.p1, e),
                                         lp_convexity_bound(2.0, e)});
          const double excess = delta - distance_with(c, bf, from, pr.x - pr.y, opt.distance, cfg);
          ++rep.inequality_checked;
          if (excess > 5e-3) ++rep.inequality_violations;
          rep.inequality_max_excess = std::max(rep.inequality_max_excess, excess);
        }
      }
      rep.max_sphere_defect =
          std::max({rep.max_sphere_defect,
                    std::abs(distance_with(c, bt, to, fx, opt.distance, cfg) - 1),
                    std::abs(distance_with(c, bt, to, fy, opt.distance, cfg) - 1)});
      d.emplace_back(distance_with(c, bf, from, pr.x - pr.y, opt.distance, cfg),
                     distance_with(c, bt, to, fx - fy, opt.distance, cfg));
    }
    auto rows = alpha_table(d, from, 0.0, opt.eps_grid);
    (dir == 0 ? rep.rows : rep.inverse) = std::move(rows);
  }
  return rep;
}

VerticalFamily solver_vertical_family(const Couple& c, const SolverConfig& cfg) {
  auto cache = std::make_shared<BasisCache>(cfg);
  return [c, cfg, cache](double s, const CVec& x, const std::vector<double>& ts) {
    const StripBasis& b = cache->at(s);
    std::vector<CVec> out;
    double tmax = 0;
    for (double t : ts) tmax = std::max(tmax, std::abs(t));
    if (tmax <= cfg.core_t) {
      const MinimalFunction f = f2_minimal(c, b, x, cfg);
      for (double t : ts) out.push_back(t == 0 ? x : eval(f.fn, cplx(s, t)));
      return out;
    }
    OrbitSampler sampler(c, b, x, cfg);
    for (double t : ts) out.push_back(sampler.at(t));
    return out;
  };
}

ModulusReport uniformity_probe(const Couple& c, const std::vector<double>& s_grid,
                               const std::vector<double>& t_grid, const ProbeOptions& opt,
                               const SolverConfig& cfg, const VerticalFamily& family) {
  check_probe(opt);
  if (s_grid.empty() || t_grid.empty()) throw std::invalid_argument("empty s or t grid");
  for (double s : s_grid)
    if (!(s > 0 && s < 1)) throw std::invalid_argument("s values must lie in (0,1)");
  ModulusReport rep;
  rep.kind = "uniformity";
  rep.eps_grid = opt.eps_grid;
  rep.s_grid = s_grid;
  rep.t_grid = t_grid;
  rep.n_pairs = opt.n_pairs;
  rep.seed = opt.seed;
  BasisCache cache(cfg);
  const bool exact_distance = opt.distance == DistanceMode::Auto && is_diagonal(c);
  const VerticalFamily fam = family ? family : solver_vertical_family(c, cfg);

  const std::size_t S = s_grid.size(), T = t_grid.size(), E = opt.eps_grid.size();
  // alpha[si][ti][ei]
  std::vector<std::vector<std::vector<double>>> alpha(S, std::vector<std::vector<double>>(T));
  for (std::size_t si = 0; si < S; ++si) {
    const double s = s_grid[si];
    const StripBasis* b = exact_distance ? nullptr : &cache.at(s);
    const auto pairs = sample_pairs_seeded(c, s, opt, cfg, stream_seed(opt.seed, 100 + si), b);
    std::vector<std::vector<std::pair<double, double>>> d(T);
    for (const auto& pr : pairs) {
      const auto ix = fam(s, pr.x, t_grid), iy = fam(s, pr.y, t_grid);
      const double dxy = distance_with(c, b, s, pr.x - pr.y, opt.distance, cfg);
      for (std::size_t ti = 0; ti < T; ++ti) {
        d[ti].emplace_back(dxy, distance_with(c, b, s, ix[ti] - iy[ti], opt.distance, cfg));
        rep.max_sphere_defect = std::max(
            rep.max_sphere_defect, std::abs(distance_with(c, b, s, ix[ti], opt.distance, cfg) - 1));
      }
    }
    for (std::size_t ti = 0; ti < T; ++ti) {
      auto rows = alpha_table(d[ti], s, t_grid[ti], opt.eps_grid);
      for (const auto& r : rows) alpha[si][ti].push_back(r.alpha_hat);
      rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
    }
  }

  bool degrading = false;
  rep.spread = 1, rep.grid_spread = 1;
  for (std::size_t ei = 0; ei < E; ++ei) {
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0;
    for (std::size_t ti = 0; ti < T; ++ti) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0;
      bool monotone = S > 1;
      for (std::size_t si = 0; si < S; ++si) {
        const double a = alpha[si][ti][ei];
        lo = std::min(lo, a), hi = std::max(hi, a);
        if (si > 0 && !(a < alpha[si - 1][ti][ei])) monotone = false;
      }
      gmin = std::min(gmin, lo), gmax = std::max(gmax, hi);
      rep.spread = std::max(rep.spread, lo > 0 ? hi / lo : std::numeric_limits<double>::infinity());
      const double first = alpha[0][ti][ei], last = alpha[S - 1][ti][ei];
      if (monotone && first > 0 && last / first < opt.degrade_ratio) degrading = true;
    }
    rep.grid_spread =
        std::max(rep.grid_spread, gmin > 0 ? gmax / gmin : std::numeric_limits<double>::infinity());
  }
  if (rep.spread < opt.spread_factor)
    rep.verdict = ModulusReport::Verdict::UniformAcrossGrid;
  else if (degrading)
    rep.verdict = ModulusReport::Verdict::Degrading;
  else
    rep.verdict = ModulusReport::Verdict::Inconclusive;
  return rep;
}

}  // namespace interp
