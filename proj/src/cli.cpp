// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "interp/dynamics.hpp"
#include "interp/oracles.hpp"
#include "interp/serialize.hpp"
#include "interp/spheres.hpp"

#ifndef INTERP_VERSION
#define INTERP_VERSION "0.0.0"
#endif

namespace interp {

namespace {

const SolverConfig kDefaults{};

struct Options {
  std::string couple;
  std::string x;
  double theta = 0.5;
  double theta_prime = 0.75;
  std::string format = "json";
  std::string output;
  // discretisation and solver
  Index K = kDefaults.K;
  Index M = kDefaults.M;
  double rate_max = kDefaults.rate_max;
  double rate_step = kDefaults.rate_step;
  double tol = kDefaults.energy.tol;
  double accept = kDefaults.energy.accept;
  int max_iter = kDefaults.energy.max_iter;
  int fallback_iter = kDefaults.fallback_iter;
  double minimax_tol = kDefaults.minimax_tol;
  int ladder = kDefaults.minimax.ladder;
  double tau0 = kDefaults.minimax.tau0;
  int stage_iter = kDefaults.minimax.stage.max_iter;
  std::uint64_t seed = 0;
  // command parameters
  std::string mode = "calderon";
  std::string t = "[1]";
  std::string grid = "[0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9]";
  std::string eps = "[0.05,0.1,0.2,0.4]";
  std::string s_grid = "[0.55,0.65,0.75,0.85,0.95]";
  std::string t_grid = "[-2,-1,0,1,2]";
  std::string z;
  std::string distance = "auto";
  int side = 0;
  int order = 1;
  int k_max = 6;
  double delta_tol = 1e-2;
  int n_pairs = 100;
  double period = 0;
  int nmax = 32;
  int samples = 128;
  double class_tol = 1e-3;
  double scan_max = 20.0;
};

struct Report {
  json config;
  json result;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool converged = true;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int thread_count() {
  const char* env = std::getenv("INTERP_LAB_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("INTERP_LAB_THREADS must be a positive integer");
  return int(v);
}

void check_theta(double theta, const char* name) {
  if (!(theta > 0 && theta < 1)) throw ConfigError(std::string(name) + " must lie in (0,1)");
}

SolverConfig solver_config(const Options& o) {
  if (o.K < 0) throw ConfigError("K must be nonnegative");
  if (o.M < 16) throw ConfigError("M must be at least 16");
  if (!(o.tol > 0) || !(o.minimax_tol > 0) || !(o.accept >= 0)) throw ConfigError("tolerances must be positive");
  if (!(o.rate_max > 0) || !(o.rate_step > 0)) throw ConfigError("rate grid must be positive");
  if (o.fallback_iter < 0) throw ConfigError("--fallback-iter must be nonnegative");
  if (o.max_iter < 1 || o.stage_iter < 1 || o.ladder < 1)
    throw ConfigError("iteration limits must be positive");
  if (!(o.tau0 > 0)) throw ConfigError("tau0 must be positive");
  SolverConfig cfg;
  cfg.K = o.K;
  cfg.M = o.M;
  cfg.rate_max = o.rate_max;
  cfg.rate_step = o.rate_step;
  cfg.energy.tol = o.tol;
  cfg.energy.max_iter = o.max_iter;
  cfg.energy.accept = o.accept;
  cfg.warm.accept = o.accept;
  cfg.warm.tol = o.tol;
  cfg.warm.max_iter = o.max_iter;
  cfg.fallback_iter = o.fallback_iter;
  cfg.minimax.ladder = o.ladder;
  cfg.minimax.tau0 = o.tau0;
  cfg.minimax.stage.max_iter = o.stage_iter;
  cfg.minimax_tol = o.minimax_tol;
  cfg.seed = o.seed;
  return cfg;
}

json solver_json(const SolverConfig& cfg) {
  json j;
  j["K"] = cfg.K;
  j["M"] = cfg.M;
  j["rate_max"] = cfg.rate_max;
  j["rate_step"] = cfg.rate_step;
  j["t_extent"] = cfg.t_extent;
  j["core_t"] = cfg.core_t;
  j["svd_cut"] = cfg.svd_cut;
  j["eps"] = cfg.eps;
  j["energy"] = {{"tol", cfg.energy.tol},
                 {"accept", cfg.energy.accept},
                 {"max_iter", cfg.energy.max_iter},
                 {"memory", cfg.energy.memory},
                 {"fallback_iter", cfg.fallback_iter}};
  j["minimax"] = {{"ladder", cfg.minimax.ladder},
                  {"tau0", cfg.minimax.tau0},
                  {"stage_max_iter", cfg.minimax.stage.max_iter},
                  {"stage_tol", cfg.minimax.stage.tol},
                  {"tol", cfg.minimax_tol}};
  j["seed"] = cfg.seed;
  return j;
}

json report_json(const SolveReport& r) {
  return {{"objective", r.objective},
          {"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"grad_norm", r.grad_norm},
          {"converged", r.converged},
          {"seed", r.seed}};
}

struct Context {
  const Options& o;
  Couple couple;
  json couple_echo;
  SolverConfig cfg;
  Report rep;
};

CVec input_x(Context& ctx) {
  if (ctx.o.x.empty()) throw ConfigError("--x is required");
  CVec x;
  try {
    x = parse_cvec(ctx.o.x);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (x.size() != ctx.couple.n())
    throw ConfigError("x has dimension " + std::to_string(x.size()) + " but the couple has " +
                      std::to_string(ctx.couple.n()));
  ctx.rep.config["x"] = cvec_json(x);
  return x;
}

std::vector<double> input_grid(Context& ctx, const std::string& text, const char* key) {
  std::vector<double> g;
  try {
    g = parse_grid(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ctx.rep.config[key] = g;
  return g;
}

double theta_distance(const Couple& c, double theta, const CVec& v, const SolverConfig& cfg) {
  return sphere_distance(c, theta, v, DistanceMode::Auto, cfg);
}

void vector_rows(Report& rep, const CVec& v) {
  rep.columns = {"index", "re", "im"};
  for (Index i = 0; i < v.size(); ++i) rep.rows.push_back({std::to_string(i), num(v(i).real()), num(v(i).imag())});
}

// --- subcommands ---------------------------------------------------------------

void cmd_norm(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  if (o.mode != "calderon" && o.mode != "energy") throw ConfigError("--mode must be calderon or energy");
  ctx.rep.config["theta"] = o.theta;
  ctx.rep.config["mode"] = o.mode;
  const CVec x = input_x(ctx);
  StripBasis b(o.theta, ctx.cfg);
  json& r = ctx.rep.result;
  double value = 0, energy = 0;
  if (o.mode == "calderon") {
    const NormResult nr = calderon_norm(ctx.couple, b, x, ctx.cfg);
    value = nr.value, energy = nr.energy;
    r["report"] = report_json(nr.report);
    ctx.rep.converged = nr.report.converged;
  } else {
    if (x.isZero(0.0)) {
      r["report"] = report_json(SolveReport{0, 0, 0, 0, true, ctx.cfg.seed});
    } else {
      const MinimalFunction f = f2_minimal(ctx.couple, b, x, ctx.cfg);
      value = energy = f.energy;
      r["report"] = report_json(f.report);
      ctx.rep.converged = f.report.converged;
    }
  }
  r["value"] = value;
  r["energy"] = energy;
  ctx.rep.columns = {"theta", "value", "energy", "converged"};
  ctx.rep.rows.push_back({num(o.theta), num(value), num(energy), ctx.rep.converged ? "1" : "0"});
}

void cmd_norm_path(Context& ctx) {
  const Options& o = ctx.o;
  const CVec x = input_x(ctx);
  const auto grid = input_grid(ctx, o.grid, "grid");
  for (double th : grid) check_theta(th, "grid values");
  if (o.k_max < 4 || o.k_max > 20) throw ConfigError("--k-max must lie in [4, 20]");
  ctx.rep.config["k_max"] = o.k_max;
  const NormPath p = norm_path(ctx.couple, x, grid, ctx.cfg, o.k_max);
  json pts = json::array();
  ctx.rep.columns = {"theta", "value", "energy", "converged"};
  for (const auto& pt : p.points) {
    pts.push_back({{"theta", pt.theta}, {"value", pt.value}, {"energy", pt.energy}, {"converged", pt.converged}});
    ctx.rep.rows.push_back({num(pt.theta), num(pt.value), num(pt.energy), pt.converged ? "1" : "0"});
  }
  json& r = ctx.rep.result;
  r["points"] = pts;
  r["limit0"] = p.limit0;
  r["limit1"] = p.limit1;
  r["norm0"] = norm_eval(ctx.couple.x0, x);
  r["norm1"] = norm_eval(ctx.couple.x1, x);
  r["gap0"] = p.gap0;
  r["gap1"] = p.gap1;
  r["extrapolation_err0"] = p.extrapolation_err0;
  r["extrapolation_err1"] = p.extrapolation_err1;
  r["convexity_slack"] = p.convexity_slack;
  ctx.rep.converged = p.converged;
}

void cmd_kfun(Context& ctx) {
  const CVec x = input_x(ctx);
  const auto ts = input_grid(ctx, ctx.o.t, "t");
  for (double t : ts)
    if (!(t > 0)) throw ConfigError("t values must be positive");
  json vals = json::array();
  ctx.rep.columns = {"t", "value", "converged"};
  for (double t : ts) {
    const KResult k = k_functional(ctx.couple, x, t);
    vals.push_back({{"t", t}, {"value", k.value}, {"x1", cvec_json(k.x1)}, {"report", report_json(k.report)}});
    ctx.rep.rows.push_back({num(t), num(k.value), k.report.converged ? "1" : "0"});
    ctx.rep.converged = ctx.rep.converged && k.report.converged;
  }
  ctx.rep.result["values"] = vals;
}

void cmd_gagliardo(Context& ctx) {
  const Options& o = ctx.o;
  if (o.side != 0 && o.side != 1) throw ConfigError("--side must be 0 or 1");
  ctx.rep.config["side"] = o.side;
  const CVec x = input_x(ctx);
  const double g = gagliardo_norm(ctx.couple, x, o.side);
  const double nv = norm_eval(o.side == 0 ? ctx.couple.x0 : ctx.couple.x1, x);
  ctx.rep.result["value"] = g;
  ctx.rep.result["norm"] = nv;
  ctx.rep.result["gap"] = std::abs(g - nv);
  ctx.rep.columns = {"side", "value", "norm"};
  ctx.rep.rows.push_back({std::to_string(o.side), num(g), num(nv)});
}

void cmd_minfun(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  ctx.rep.config["theta"] = o.theta;
  const CVec x = input_x(ctx);
  if (x.isZero(0.0)) throw ConfigError("minimal function of the zero vector");
  StripBasis b(o.theta, ctx.cfg);
  const MinimalFunction f = f2_minimal(ctx.couple, b, x, ctx.cfg);
  json& r = ctx.rep.result;
  r["energy"] = f.energy;
  r["unique"] = f.unique;
  r["flatness"] = boundary_flatness(f, b);
  r["anchor_residual"] = (eval(f.fn, cplx(o.theta, 0)) - x).norm();
  r["report"] = report_json(f.report);
  r["function"] = analytic_json(f.fn);
  ctx.rep.converged = f.report.converged;
  ctx.rep.columns = {"side", "t", "weight", "norm"};
  for (Index m = 0; m < b.nodes(); ++m) {
    const int side = m < b.side0_count() ? 0 : 1;
    ctx.rep.rows.push_back({std::to_string(side), num(b.z()[std::size_t(m)].imag()), num(b.mu()(m)),
                            num(f.side_norms(m))});
  }
}

void cmd_omega(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  if (o.order < 1 || o.order > kMaxTaylorOrder) throw ConfigError("--order out of range");
  ctx.rep.config["theta"] = o.theta;
  ctx.rep.config["order"] = o.order;
  const CVec x = input_x(ctx);
  StripBasis b(o.theta, ctx.cfg);
  const CVec w = omega(ctx.couple, b, x, o.order, ctx.cfg);
  ctx.rep.result["omega"] = cvec_json(w);
  ctx.rep.result["norm_theta"] = theta_distance(ctx.couple, o.theta, w, ctx.cfg);
  vector_rows(ctx.rep, w);
}

void cmd_vertical(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  ctx.rep.config["theta"] = o.theta;
  const auto ts = input_grid(ctx, o.t, "t");
  if (ts.size() != 1) throw ConfigError("vertical takes a single --t");
  const CVec x = input_x(ctx);
  OrbitSampler s(ctx.couple, o.theta, x, ctx.cfg);
  const CVec y = s.at(ts[0]);
  ctx.rep.result["image"] = cvec_json(y);
  ctx.rep.result["norm_theta"] = theta_distance(ctx.couple, o.theta, y, ctx.cfg);
  ctx.rep.result["solves"] = s.solves();
  ctx.rep.converged = s.converged();
  vector_rows(ctx.rep, y);
}

void cmd_orbit(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  ctx.rep.config["theta"] = o.theta;
  const auto ts = input_grid(ctx, o.t_grid, "t_grid");
  const CVec x = input_x(ctx);
  OrbitSampler s(ctx.couple, o.theta, x, ctx.cfg);
  ctx.rep.columns = {"t"};
  for (Index i = 0; i < x.size(); ++i) {
    ctx.rep.columns.push_back("re_" + std::to_string(i));
    ctx.rep.columns.push_back("im_" + std::to_string(i));
  }
  ctx.rep.columns.insert(ctx.rep.columns.end(), {"norm0", "norm1", "norm_theta"});
  json pts = json::array();
  for (double t : ts) {
    const CVec y = s.at(t);
    const double n0 = norm_eval(ctx.couple.x0, y), n1 = norm_eval(ctx.couple.x1, y);
    const double nt = theta_distance(ctx.couple, o.theta, y, ctx.cfg);
    pts.push_back({{"t", t}, {"point", cvec_json(y)}, {"norm0", n0}, {"norm1", n1}, {"norm_theta", nt}});
    std::vector<std::string> row{num(t)};
    for (Index i = 0; i < y.size(); ++i) row.push_back(num(y(i).real())), row.push_back(num(y(i).imag()));
    row.insert(row.end(), {num(n0), num(n1), num(nt)});
    ctx.rep.rows.push_back(std::move(row));
  }
  ctx.rep.result["orbit"] = pts;
  ctx.rep.result["solves"] = s.solves();
  ctx.rep.converged = s.converged();
}

ClassifyOptions classify_options(Context& ctx) {
  const Options& o = ctx.o;
  if (!(o.class_tol > 0)) throw ConfigError("--class-tol must be positive");
  if (!(o.scan_max > 0)) throw ConfigError("--scan-max must be positive");
  ClassifyOptions co;
  co.tol = o.class_tol;
  co.scan_max = o.scan_max;
  ctx.rep.config["class_tol"] = co.tol;
  ctx.rep.config["rel_tol"] = co.rel_tol;
  ctx.rep.config["max_multiplier"] = co.max_multiplier;
  ctx.rep.config["scan_max"] = co.scan_max;
  ctx.rep.config["scan_step"] = co.scan_step;
  return co;
}

json class_json(const OrbitClass& k) {
  json j;
  j["class"] = kind_name(k.kind);
  if (k.kind == OrbitClass::Kind::Periodic) {
    j["period"] = k.period;
    j["constant"] = k.constant;
  }
  j["multipliers"] = k.multipliers;
  j["frequencies"] = rvec_json(k.frequencies);
  j["norm0"] = k.norm0;
  j["norm1"] = k.norm1;
  j["recurrence_residual"] = k.recurrence_residual;
  j["note"] = k.note;
  return j;
}

void cmd_classify(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  ctx.rep.config["theta"] = o.theta;
  const CVec x = input_x(ctx);
  if (x.isZero(0.0)) throw ConfigError("orbit of the zero vector");
  const OrbitClass k = classify_orbit(ctx.couple, o.theta, x, ctx.cfg, classify_options(ctx));
  ctx.rep.result = class_json(k);
  ctx.rep.columns = {"class", "period", "recurrence_residual"};
  ctx.rep.rows.push_back({kind_name(k.kind), num(k.period), num(k.recurrence_residual)});
}

void cmd_fourier(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  ctx.rep.config["theta"] = o.theta;
  if (o.nmax < 0 || o.samples < 2 * o.nmax + 1) throw ConfigError("need samples >= 2 nmax + 1");
  const CVec x = input_x(ctx);
  if (x.isZero(0.0)) throw ConfigError("orbit of the zero vector");
  if (!is_diagonal(ctx.couple)) throw ConfigError("fourier-check needs a diagonal l_p couple");
  double T = o.period;
  if (T < 0) throw ConfigError("--period must be positive");
  if (T == 0) {
    const OrbitClass k = classify_orbit(ctx.couple, o.theta, x, ctx.cfg, classify_options(ctx));
    ctx.rep.result["classification"] = class_json(k);
    if (k.kind == OrbitClass::Kind::Singular)
      T = 1.0;
    else if (k.kind == OrbitClass::Kind::Periodic)
      T = k.period;
    else
      throw ConfigError(std::string("input orbit is ") + kind_name(k.kind) + ", not periodic");
  }
  ctx.rep.config["period"] = T;
  ctx.rep.config["nmax"] = o.nmax;
  ctx.rep.config["samples"] = o.samples;
  FourierReport f;
  try {
    f = periodic_fourier_check(ctx.couple, o.theta, x, T, ctx.cfg, o.nmax, o.samples);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  json& r = ctx.rep.result;
  r["period"] = f.period;
  r["pairing_sum"] = f.pairing_sum;
  r["off_diagonal"] = f.off_diagonal;
  r["reconstruction_residual"] = f.reconstruction_residual;
  r["functional_reconstruction_residual"] = f.functional_reconstruction_residual;
  r["recurrence"] = f.recurrence;
  r["functional_recurrence"] = f.functional_recurrence;
  json cs = json::array(), ds = json::array();
  ctx.rep.columns = {"n"};
  for (Index i = 0; i < x.size(); ++i) {
    ctx.rep.columns.push_back("c_re_" + std::to_string(i));
    ctx.rep.columns.push_back("c_im_" + std::to_string(i));
  }
  for (Index i = 0; i < x.size(); ++i) {
    ctx.rep.columns.push_back("d_re_" + std::to_string(i));
    ctx.rep.columns.push_back("d_im_" + std::to_string(i));
  }
  for (int k = -f.nmax; k <= f.nmax; ++k) {
    const CVec& c = f.c[std::size_t(k + f.nmax)];
    const CVec& d = f.d[std::size_t(k + f.nmax)];
    cs.push_back(cvec_json(c));
    ds.push_back(cvec_json(d));
    std::vector<std::string> row{std::to_string(k)};
    for (Index i = 0; i < c.size(); ++i) row.push_back(num(c(i).real())), row.push_back(num(c(i).imag()));
    for (Index i = 0; i < d.size(); ++i) row.push_back(num(d(i).real())), row.push_back(num(d(i).imag()));
    ctx.rep.rows.push_back(std::move(row));
  }
  r["c"] = cs;
  r["d"] = ds;
  ctx.rep.converged = f.converged;
}

void cmd_daher(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  check_theta(o.theta_prime, "theta-prime");
  ctx.rep.config["theta"] = o.theta;
  ctx.rep.config["theta_prime"] = o.theta_prime;
  const CVec x = input_x(ctx);
  StripBasis b(o.theta, ctx.cfg);
  const CVec y = daher_map(ctx.couple, b, o.theta_prime, x, ctx.cfg);
  ctx.rep.result["image"] = cvec_json(y);
  ctx.rep.result["norm_theta"] = theta_distance(ctx.couple, o.theta, x, ctx.cfg);
  ctx.rep.result["norm_theta_prime"] = theta_distance(ctx.couple, o.theta_prime, y, ctx.cfg);
  vector_rows(ctx.rep, y);
}

void cmd_mazur(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  if (o.k_max < 4 || o.k_max > 20) throw ConfigError("--k-max must lie in [4, 20]");
  if (!(o.delta_tol > 0)) throw ConfigError("--delta-tol must be positive");
  ctx.rep.config["theta"] = o.theta;
  ctx.rep.config["k_max"] = o.k_max;
  ctx.rep.config["delta_tol"] = o.delta_tol;
  const CVec x = input_x(ctx);
  const MazurLimitResult m = limit_mazur(ctx.couple, o.theta, x, ctx.cfg, o.k_max, o.delta_tol);
  json& r = ctx.rep.result;
  r["limit"] = cvec_json(m.limit);
  r["s"] = m.s;
  r["side1_norms"] = m.side1_norms;
  r["limit_norm1"] = m.limit_norm;
  r["gap"] = m.gap;
  r["extrapolation_err"] = m.extrapolation_err;
  r["in_delta"] = m.in_delta;
  r["note"] = m.note;
  ctx.rep.converged = m.converged;
  ctx.rep.columns = {"s", "norm1"};
  for (std::size_t k = 0; k < m.s.size(); ++k) ctx.rep.rows.push_back({num(m.s[k]), num(m.side1_norms[k])});
  ctx.rep.rows.push_back({"1", num(m.limit_norm)});
}

ProbeOptions probe_options(Context& ctx, const std::string& eps) {
  const Options& o = ctx.o;
  ProbeOptions po;
  po.n_pairs = o.n_pairs;
  po.eps_grid = input_grid(ctx, eps, "eps_grid");
  po.seed = o.seed;
  if (o.distance == "auto")
    po.distance = DistanceMode::Auto;
  else if (o.distance == "calderon")
    po.distance = DistanceMode::Calderon;
  else if (o.distance == "energy")
    po.distance = DistanceMode::Energy;
  else
    throw ConfigError("--distance must be auto, calderon or energy");
  if (po.n_pairs < 1) throw ConfigError("--n-pairs must be positive");
  for (double e : po.eps_grid)
    if (!(e > 0)) throw ConfigError("eps values must be positive");
  ctx.rep.config["n_pairs"] = po.n_pairs;
  ctx.rep.config["distance"] = o.distance;
  ctx.rep.config["spread_factor"] = po.spread_factor;
  ctx.rep.config["degrade_ratio"] = po.degrade_ratio;
  return po;
}

json rows_json(const std::vector<ModulusRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"s", r.s}, {"t", r.t}, {"eps", r.eps}, {"alpha_hat", r.alpha_hat},
                 {"censored", r.censored}, {"n_pairs", r.n_pairs}});
  return a;
}

void modulus_rows(Report& rep, const std::vector<ModulusRow>& rows) {
  rep.columns = {"s", "t", "eps", "alpha_hat", "n_pairs"};
  for (const auto& r : rows)
    rep.rows.push_back({num(r.s), num(r.t), num(r.eps), num(r.alpha_hat), std::to_string(r.n_pairs)});
}

void cmd_modulus(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  check_theta(o.theta_prime, "theta-prime");
  ctx.rep.config["theta"] = o.theta;
  ctx.rep.config["theta_prime"] = o.theta_prime;
  const ProbeOptions po = probe_options(ctx, o.eps);
  const ModulusReport m = modulus_probe(ctx.couple, o.theta, o.theta_prime, po, ctx.cfg);
  json& r = ctx.rep.result;
  r["forward"] = rows_json(m.rows);
  r["inverse"] = rows_json(m.inverse);
  r["max_sphere_defect"] = m.max_sphere_defect;
  r["inequality"] = {{"checked", m.inequality_checked},
                     {"violations", m.inequality_violations},
                     {"max_excess", m.inequality_max_excess}};
  ctx.rep.converged = m.converged;
  std::vector<ModulusRow> all = m.rows;
  all.insert(all.end(), m.inverse.begin(), m.inverse.end());
  modulus_rows(ctx.rep, all);
}

void cmd_uniformity(Context& ctx) {
  const Options& o = ctx.o;
  const auto s = input_grid(ctx, o.s_grid, "s_grid");
  for (double v : s) check_theta(v, "s values");
  const auto t = input_grid(ctx, o.t_grid, "t_grid");
  const ProbeOptions po = probe_options(ctx, o.eps);
  const ModulusReport m = uniformity_probe(ctx.couple, s, t, po, ctx.cfg);
  json& r = ctx.rep.result;
  r["verdict"] = verdict_name(m.verdict);
  r["spread"] = m.spread;
  r["grid_spread"] = m.grid_spread;
  r["max_sphere_defect"] = m.max_sphere_defect;
  r["table"] = rows_json(m.rows);
  ctx.rep.converged = m.converged;
  modulus_rows(ctx.rep, m.rows);
}

void cmd_oracle(Context& ctx) {
  const Options& o = ctx.o;
  check_theta(o.theta, "theta");
  if (!is_diagonal(ctx.couple)) throw ConfigError("oracle needs a diagonal l_p couple");
  ctx.rep.config["theta"] = o.theta;
  const CVec x = input_x(ctx);
  cplx z(o.theta, 0);
  if (!o.z.empty()) {
    try {
      z = parse_complex(json::parse(o.z));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("malformed --z: ") + e.what());
    }
    if (z.real() < 0 || z.real() > 1) throw ConfigError("--z must lie in the closed strip");
  }
  ctx.rep.config["z"] = complex_json(z);
  const LpCoupleSpec s = lp_couple_spec(ctx.couple);
  json& r = ctx.rep.result;
  r["p_theta"] = extended_json(theta_exponent(s, o.theta));
  r["rate"] = vertical_rate(s, o.theta);
  r["norm"] = lp_interpolation_norm(s, o.theta, x);
  CVec fz = CVec::Zero(x.size());
  if (!x.isZero(0.0)) {
    if (std::isinf(theta_exponent(s, o.theta))) throw ConfigError("closed form needs a finite p_theta");
    fz = lp_minimal_function(s, o.theta, x, z);
    r["omega"] = cvec_json(lp_omega(s, o.theta, x));
    r["frequencies"] = rvec_json(lp_vertical_frequencies(s, o.theta, x));
  }
  r["minimal_value"] = cvec_json(fz);
  vector_rows(ctx.rep, fz);
}

// --- driver --------------------------------------------------------------------

void emit(const Report& rep, const std::string& format, std::ostream& out) {
  json doc;
  doc["tool"] = "interp-lab";
  doc["version"] = INTERP_VERSION;
  doc["config"] = rep.config;
  doc["converged"] = rep.converged;
  doc["result"] = rep.result;
  if (format == "json") {
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# interp-lab v" << INTERP_VERSION << '\n';
  out << "# config " << rep.config.dump() << '\n';
  out << "# converged " << (rep.converged ? "true" : "false") << '\n';
  for (std::size_t i = 0; i < rep.columns.size(); ++i) out << (i ? "," : "") << rep.columns[i];
  out << '\n';
  for (const auto& row : rep.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

using Handler = std::function<void(Context&)>;

struct Command {
  const char* name;
  const char* help;
  Handler run;
  bool needs_seed;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Numerical laboratory for complex interpolation of finite-dimensional couples",
               "interp-lab"};
  app.set_version_flag("--version", std::string("interp-lab ") + INTERP_VERSION);
  app.require_subcommand(1);

  const std::vector<Command> commands{
      {"norm", "interpolation norm ||x||_theta", cmd_norm, false},
      {"norm-path", "norms along a theta grid with endpoint limits", cmd_norm_path, false},
      {"kfun", "K-functional K(x, t)", cmd_kfun, false},
      {"gagliardo", "Gagliardo completion norm of one side", cmd_gagliardo, false},
      {"minfun", "minimal function through x", cmd_minfun, false},
      {"omega", "Taylor coefficient of the minimal function", cmd_omega, false},
      {"vertical", "vertical map x -> F_x(theta + i t)", cmd_vertical, false},
      {"orbit", "vertical orbit samples", cmd_orbit, false},
      {"classify", "orbit class of x", cmd_classify, false},
      {"fourier-check", "Fourier pairing identities along a periodic orbit", cmd_fourier, false},
      {"daher", "map between the spheres of X_theta and X_theta'", cmd_daher, false},
      {"mazur-limit", "limit of F_x(s) as s -> 1", cmd_mazur, false},
      {"modulus", "empirical modulus of the sphere maps", cmd_modulus, true},
      {"uniformity", "empirical moduli of vertical maps across s", cmd_uniformity, true},
      {"oracle", "closed forms for diagonal l_p couples", cmd_oracle, false},
  };

  std::map<std::string, CLI::App*> subs;
  std::map<std::string, CLI::Option*> seed_opts;
  for (const auto& c : commands) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    subs[c.name] = s;
    s->add_option("--couple", o.couple, "couple JSON file")->required();
    s->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--output,-o", o.output, "output file (default stdout)");
    s->add_option("--K", o.K, "disk-series degree");
    s->add_option("--M", o.M, "boundary nodes per side");
    s->add_option("--rate-max", o.rate_max, "largest exponential rate");
    s->add_option("--rate-step", o.rate_step, "exponential rate spacing");
    s->add_option("--tol", o.tol, "gradient tolerance of the energy solver");
    s->add_option("--accept", o.accept, "gradient level accepted as converged when the energy solver stalls");
    s->add_option("--max-iter", o.max_iter, "iteration cap of the energy solver");
    s->add_option("--fallback-iter", o.fallback_iter,
                  "plain energy iterations before a preconditioned restart (0 disables)");
    s->add_option("--minimax-tol", o.minimax_tol, "gradient tolerance of the last smoothing stage");
    s->add_option("--ladder", o.ladder, "number of smoothing temperatures");
    s->add_option("--tau0", o.tau0, "first smoothing temperature");
    s->add_option("--stage-iter", o.stage_iter, "iterations per smoothing stage");
    seed_opts[c.name] = s->add_option("--seed", o.seed, "random seed");
  }
  auto sub = [&](const char* n) { return subs.at(n); };
  for (const char* n : {"norm", "norm-path", "kfun", "gagliardo", "minfun", "omega", "vertical", "orbit",
                        "classify", "fourier-check", "daher", "mazur-limit", "oracle"})
    sub(n)->add_option("--x", o.x, "vector as JSON, entries real or [re, im]")->required();
  for (const char* n : {"norm", "minfun", "omega", "vertical", "orbit", "classify", "fourier-check",
                        "daher", "mazur-limit", "modulus", "oracle"})
    sub(n)->add_option("--theta", o.theta, "base point in (0,1)");
  for (const char* n : {"daher", "modulus"}) sub(n)->add_option("--theta-prime", o.theta_prime, "target point in (0,1)");
  sub("norm")->add_option("--mode", o.mode, "calderon or energy");
  sub("norm-path")->add_option("--grid", o.grid, "theta grid");
  for (const char* n : {"norm-path", "mazur-limit"}) sub(n)->add_option("--k-max", o.k_max, "last extrapolation level");
  sub("kfun")->add_option("--t", o.t, "t value or list");
  sub("vertical")->add_option("--t", o.t, "vertical time");
  sub("gagliardo")->add_option("--side", o.side, "0 or 1");
  sub("omega")->add_option("--order", o.order, "Taylor order");
  sub("orbit")->add_option("--t-grid", o.t_grid, "t values");
  for (const char* n : {"classify", "fourier-check"}) {
    sub(n)->add_option("--class-tol", o.class_tol, "classification tolerance");
    sub(n)->add_option("--scan-max", o.scan_max, "recurrence scan range for general couples");
  }
  sub("fourier-check")->add_option("--period", o.period, "period (default: from the classification)");
  sub("fourier-check")->add_option("--nmax", o.nmax, "largest Fourier index");
  sub("fourier-check")->add_option("--samples", o.samples, "samples per period");
  sub("mazur-limit")->add_option("--delta-tol", o.delta_tol, "tolerance of the endpoint norm gap");
  for (const char* n : {"modulus", "uniformity"}) {
    sub(n)->add_option("--n-pairs", o.n_pairs, "sampled pairs per sphere");
    sub(n)->add_option("--eps-grid", o.eps, "eps values");
    sub(n)->add_option("--distance", o.distance, "auto, calderon or energy");
  }
  sub("uniformity")->add_option("--s-grid", o.s_grid, "base points");
  sub("uniformity")->add_option("--t-grid", o.t_grid, "vertical times");
  sub("oracle")->add_option("--z", o.z, "evaluation point, real or [re, im]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "interp-lab: " << e.what() << '\n';
    return kExitConfig;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands)
    if (subs.at(c.name)->parsed()) cmd = &c;
  if (!cmd) {
    err << "interp-lab: no subcommand\n";
    return kExitConfig;
  }

  Report rep;
  try {
    if (cmd->needs_seed && seed_opts.at(cmd->name)->count() == 0)
      throw ConfigError(std::string(cmd->name) + " needs --seed");
    const int threads = thread_count();
    Eigen::setNbThreads(threads);
    Context ctx{o, Couple{}, json{}, solver_config(o), Report{}};
    try {
      ctx.couple = load_couple(o.couple);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    ctx.rep.config["command"] = cmd->name;
    ctx.rep.config["couple_file"] = o.couple;
    ctx.rep.config["couple"] = couple_json(ctx.couple);
    ctx.rep.config["solver"] = solver_json(ctx.cfg);
    ctx.rep.config["threads"] = threads;
    ctx.rep.config["format"] = o.format;
    cmd->run(ctx);
    rep = std::move(ctx.rep);
  } catch (const ConfigError& e) {
    err << "interp-lab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "interp-lab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "interp-lab: unsupported: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "interp-lab: " << e.what() << '\n';
    return 1;
  }

  if (o.output.empty()) {
    emit(rep, o.format, out);
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f) {
      err << "interp-lab: cannot write '" << o.output << "'\n";
      return kExitConfig;
    }
    emit(rep, o.format, f);
  }
  if (!rep.converged) {
    err << "interp-lab: solver did not converge; report written\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

}  // namespace interp
