// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_SERIALIZE_HPP
#define INTERP_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "interp/interpolation.hpp"

namespace interp {

using json = nlohmann::ordered_json;

/// Extended real: a number or the token "inf".
double parse_extended(const json& j);
json extended_json(double v);

/// Complex scalar: a real number, an [re, im] pair, or {"re": .., "im": ..}.
cplx parse_complex(const json& j);
json complex_json(const cplx& z);

CVec parse_cvec(const json& j);
/// Parses a vector from JSON text, e.g. "[1, [0, 2]]".
CVec parse_cvec(const std::string& text);
json cvec_json(const CVec& v);
json rvec_json(const RVec& v);
json cmat_json(const CMat& m);  // list of rows

NormSpec parse_norm(const json& j);
json norm_json(const NormSpec& s);

/// Couple file: {"norm0": NormSpec, "norm1": NormSpec}.
Couple parse_couple(const json& j);
Couple load_couple(const std::string& path);
json couple_json(const Couple& c);

/// {"theta", "dim", "coeffs" (disk series rows), "rates", "expo" (rows per rate)}
json analytic_json(const AnalyticFn& f);
AnalyticFn parse_analytic(const json& j);

std::vector<double> parse_grid(const std::string& text);

}  // namespace interp

#endif  // INTERP_SERIALIZE_HPP
