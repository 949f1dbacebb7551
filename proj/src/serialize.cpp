// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "interp/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace interp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

double parse_extended(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "infinity") return kInf;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  fail("expected a number or \"inf\", got " + j.dump());
}

json extended_json(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object() && j.contains("re"))
    return {j.at("re").get<double>(), j.value("im", 0.0)};
  fail("expected a real, [re, im] or {\"re\", \"im\"}, got " + j.dump());
}

json complex_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

CVec parse_cvec(const json& j) {
  if (!j.is_array() || j.empty()) fail("expected a nonempty vector");
  CVec v(Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(Index(i)) = parse_complex(j[i]);
  return v;
}

CVec parse_cvec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail("malformed vector '" + text + "': " + e.what());
  }
  return parse_cvec(j);
}

json cvec_json(const CVec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

json rvec_json(const RVec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json cmat_json(const CMat& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(cvec_json(m.row(r).transpose()));
  return a;
}

NormSpec parse_norm(const json& j) {
  if (!j.is_object() || !j.contains("kind")) fail("norm needs a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "weighted_lp") {
    const double p = parse_extended(j.at("p"));
    const json& w = j.at("weights");
    if (!w.is_array() || w.empty()) fail("weights must be a nonempty list");
    RVec wv(Index(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) wv(Index(i)) = w[i].get<double>();
    return weighted_lp(p, wv);
  }
  if (kind == "quadratic") {
    const json& m = j.at("matrix");
    if (!m.is_array() || m.empty()) fail("matrix must be a nonempty list of rows");
    const Index n = Index(m.size());
    CMat A(n, n);
    for (Index r = 0; r < n; ++r) {
      const json& row = m[std::size_t(r)];
      if (!row.is_array() || Index(row.size()) != n) fail("matrix must be square");
      for (Index c = 0; c < n; ++c) A(r, c) = parse_complex(row[std::size_t(c)]);
    }
    return quadratic(A);
  }
  if (kind == "max") {
    const json& of = j.at("of");
    if (!of.is_array()) fail("\"of\" must be a list");
    std::vector<NormSpec> parts;
    for (const auto& e : of) parts.push_back(parse_norm(e));
    return max_of(std::move(parts));
  }
  if (kind == "scaled") return scaled(j.at("c").get<double>(), parse_norm(j.at("inner")));
  fail("unknown norm kind \"" + kind + "\"");
}

json norm_json(const NormSpec& s) {
  return std::visit(
      overloaded{[](const WeightedLp& a) {
                   json j;
                   j["kind"] = "weighted_lp";
                   j["p"] = extended_json(a.p);
                   j["weights"] = rvec_json(a.w);
                   return j;
                 },
                 [](const Quadratic& a) {
                   json j;
                   j["kind"] = "quadratic";
                   json rows = json::array();
                   for (Index r = 0; r < a.A.rows(); ++r) {
                     json row = json::array();
                     for (Index c = 0; c < a.A.cols(); ++c)
                       row.push_back(json{{"re", a.A(r, c).real()}, {"im", a.A(r, c).imag()}});
                     rows.push_back(row);
                   }
                   j["matrix"] = rows;
                   return j;
                 },
                 [](const MaxOf& a) {
                   json j;
                   j["kind"] = "max";
                   j["of"] = json::array();
                   for (const auto& e : a.of) j["of"].push_back(norm_json(e));
                   return j;
                 },
                 [](const Scaled& a) {
                   json j;
                   j["kind"] = "scaled";
                   j["c"] = a.c;
                   j["inner"] = norm_json(*a.inner);
                   return j;
                 }},
      s.v);
}

Couple parse_couple(const json& j) {
  if (!j.is_object() || !j.contains("norm0") || !j.contains("norm1"))
    fail("couple needs \"norm0\" and \"norm1\"");
  return make_couple(parse_norm(j.at("norm0")), parse_norm(j.at("norm1")));
}

Couple load_couple(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open couple file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail("malformed couple file '" + path + "': " + e.what());
  }
  return parse_couple(j);
}

json couple_json(const Couple& c) {
  json j;
  j["dim"] = c.n();
  j["norm0"] = norm_json(c.x0);
  j["norm1"] = norm_json(c.x1);
  return j;
}

json analytic_json(const AnalyticFn& f) {
  auto rows = [](const CMat& m) {
    json a = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c)
        row.push_back(json{{"re", m(r, c).real()}, {"im", m(r, c).imag()}});
      a.push_back(row);
    }
    return a;
  };
  json j;
  j["theta"] = f.theta;
  j["dim"] = f.n;
  j["coeffs"] = rows(f.disk);
  j["rates"] = rvec_json(f.rates);
  j["expo"] = rows(f.expo);
  return j;
}

AnalyticFn parse_analytic(const json& j) {
  AnalyticFn f;
  f.theta = j.at("theta").get<double>();
  f.n = j.at("dim").get<Index>();
  auto rows = [&](const json& a) {
    CMat m(Index(a.size()), f.n);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (Index(a[r].size()) != f.n) fail("coefficient row of the wrong length");
      for (Index c = 0; c < f.n; ++c) m(Index(r), c) = parse_complex(a[r][std::size_t(c)]);
    }
    return m;
  };
  f.disk = rows(j.at("coeffs"));
  if (f.disk.rows() == 0) fail("empty coefficient list");
  const json rates = j.value("rates", json::array());
  f.rates = RVec(Index(rates.size()));
  for (std::size_t i = 0; i < rates.size(); ++i) f.rates(Index(i)) = rates[i].get<double>();
  f.expo = j.contains("expo") ? rows(j.at("expo")) : CMat(0, f.n);
  if (f.expo.rows() != f.rates.size()) fail("rates and expo rows differ in number");
  return f;
}

std::vector<double> parse_grid(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    // comma-separated list
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) fail("malformed grid '" + text + "'");
        out.push_back(v);
      } catch (const std::invalid_argument&) {
        fail("malformed grid '" + text + "'");
      } catch (const std::out_of_range&) {
        fail("malformed grid '" + text + "'");
      }
    }
    if (out.empty()) fail("empty grid");
    return out;
  }
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array() || j.empty()) fail("grid must be a nonempty list of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) fail("grid must be a nonempty list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace interp
