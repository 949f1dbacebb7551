// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_TESTS_HELPERS_HPP
#define INTERP_TESTS_HELPERS_HPP

#include <cstdio>
#include <random>
#include <string>

#include <sys/wait.h>

#include "interp/oracles.hpp"

namespace interp::testing {

inline CVec random_cvec(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  CVec x(n);
  for (Index i = 0; i < n; ++i) x(i) = cplx(g(rng), g(rng));
  return x;
}

/// Random vector with ||x||_theta = 1 for a diagonal couple.
inline CVec random_unit(std::mt19937_64& rng, const LpCoupleSpec& s, double theta) {
  CVec x = random_cvec(rng, s.w0.size());
  return x / lp_interpolation_norm(s, theta, x);
}

inline double max_abs(const CVec& v) { return v.cwiseAbs().maxCoeff(); }

struct Run {
  int code = -1;
  std::string out;
};

/// Runs a shell command and captures its standard output and exit status.
inline Run run_command(const std::string& cmd) {
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace interp::testing

#endif  // INTERP_TESTS_HELPERS_HPP
