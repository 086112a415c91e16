// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON run configuration. Fractions are {"num": int, "den": int}; integers may
// also be given as decimal strings when they do not fit in 64 bits.
//
//   {
//     "ifs": {"f": {"rate": {"num": 1, "den": 3}, "shift": {"num": 0, "den": 1}},
//             "g": {"rate": {"num": 1, "den": 3}, "shift": {"num": 2, "den": 3}}},
//     "m": 3,
//     "c": {"num": 1, "den": 4},
//     "M": [12, 120, 4000, 400000],
//     "omega": {"num": 1, "den": 3},                        optional
//     "overrides": {"N": 2, "ell": 2, "kmax": 3,            all optional
//                   "scan_cap": 10000000, "refine_cap": 64},
//     "output_dir": "out"                                    optional
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirifs/construction.hpp"
#include "dirifs/digest.hpp"

namespace dirifs {

using json = nlohmann::json;

struct MapConfig {
  Rational rate;
  Rational shift;
  friend bool operator==(const MapConfig&, const MapConfig&) = default;
};

struct RunConfig {
  MapConfig f;
  MapConfig g;
  int m = 2;
  Rational c{1, 2};
  std::vector<std::int64_t> M;
  std::optional<Rational> omega;
  std::optional<long> N;
  std::optional<long> ell;
  std::optional<int> kmax;
  std::uint64_t scan_cap = 10'000'000;
  int refine_cap = 64;
  std::optional<std::string> output_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  IfsPair ifs() const {
    auto make = [](const MapConfig& mc, const char* path) {
      try {
        return AffineMap(mc.rate.num(), mc.rate.den(), mc.shift);
      } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
      }
    };
    return IfsPair(make(f, ".ifs.f.rate"), make(g, ".ifs.g.rate"));
  }

  ConstructionParams params() const {
    ConstructionParams p{ifs()};
    p.m = m;
    p.c = c;
    p.M = M;
    p.omega = omega;
    p.N_override = N;
    p.ell_override = ell;
    return p;
  }

  /// Canonical form: optional fields omitted when unset, keys sorted.
  json to_json() const {
    json j;
    j["ifs"] = {{"f", map_json(f)}, {"g", map_json(g)}};
    j["m"] = m;
    j["c"] = frac_json(c);
    j["M"] = M;
    if (omega) j["omega"] = frac_json(*omega);
    json o = json::object();
    if (N) o["N"] = *N;
    if (ell) o["ell"] = *ell;
    if (kmax) o["kmax"] = *kmax;
    o["scan_cap"] = scan_cap;
    o["refine_cap"] = refine_cap;
    j["overrides"] = o;
    if (output_dir) j["output_dir"] = *output_dir;
    return j;
  }

  std::string canonical() const { return to_json().dump(2) + "\n"; }
  /// Hash of the mathematical content; the output directory does not participate.
  std::string hash() const {
    json j = to_json();
    j.erase("output_dir");
    return fnv1a_hex(j.dump());
  }

  static RunConfig from_json(const json& j);

 private:
  static json frac_json(const Rational& r) {
    auto as_json = [](const Integer& n) -> json {
      if (n.fits_slong_p()) return n.get_si();
      return n.get_str();
    };
    return {{"num", as_json(r.num())}, {"den", as_json(r.den())}};
  }
  static json map_json(const MapConfig& mc) { return {{"rate", frac_json(mc.rate)}, {"shift", frac_json(mc.shift)}}; }
};

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object at '" + (path.empty() ? "." : path) + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing field '" + path + "." + key + "'");
  return *it;
}

inline Integer integer_at(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.is_number_unsigned() ? Integer(std::to_string(j.get<std::uint64_t>()))
                                                           : Integer(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_string()) {
    Integer out;
    if (out.set_str(j.get<std::string>(), 10) == 0) return out;
  }
  throw ConfigError(path, "expected an integer at '" + path + "'");
}

inline std::int64_t int64_at(const json& j, const std::string& path) {
  Integer n = integer_at(j, path);
  if (!n.fits_slong_p()) throw ConfigError(path, "integer out of range at '" + path + "'");
  return n.get_si();
}

inline Rational fraction_at(const json& j, const std::string& path) {
  Integer num = integer_at(field(j, "num", path), path + ".num");
  Integer den = integer_at(field(j, "den", path), path + ".den");
  if (den == 0) throw ConfigError(path + ".den", "zero denominator at '" + path + ".den'");
  return Rational(num, den);
}

}  // namespace detail

inline RunConfig RunConfig::from_json(const json& j) {
  using detail::field;
  RunConfig cfg;
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  const json& ifs = field(j, "ifs", "");
  for (const char* name : {"f", "g"}) {
    const std::string base = std::string(".ifs.") + name;
    const json& mj = field(ifs, name, ".ifs");
    MapConfig mc{detail::fraction_at(field(mj, "rate", base), base + ".rate"),
                 detail::fraction_at(field(mj, "shift", base), base + ".shift")};
    if (mc.rate <= Rational(0) || mc.rate >= Rational(1)) {
      throw ConfigError(base + ".rate", "rate must lie in (0, 1) at '" + base + ".rate'");
    }
    (name[0] == 'f' ? cfg.f : cfg.g) = mc;
  }
  const std::int64_t m = detail::int64_at(field(j, "m", ""), ".m");
  if (m < 2 || m > 64) throw ConfigError(".m", "m must lie in [2, 64]");
  cfg.m = static_cast<int>(m);
  cfg.c = detail::fraction_at(field(j, "c", ""), ".c");
  if (cfg.c <= Rational(0) || cfg.c >= Rational(1)) throw ConfigError(".c", "c must lie in (0, 1)");
  const json& M = field(j, "M", "");
  if (!M.is_array() || M.empty()) throw ConfigError(".M", "M must be a nonempty array");
  for (std::size_t i = 0; i < M.size(); ++i) {
    const std::string path = ".M[" + std::to_string(i) + "]";
    std::int64_t v = detail::int64_at(M[i], path);
    if (v <= 0) throw ConfigError(path, "M entries must be positive");
    if (!cfg.M.empty() && v <= cfg.M.back()) throw ConfigError(path, "M must be strictly increasing");
    cfg.M.push_back(v);
  }
  if (j.contains("omega") && !j["omega"].is_null()) {
    Rational w = detail::fraction_at(j["omega"], ".omega");
    if (w < Rational(1, cfg.m) || w > Rational(1, cfg.m - 1)) {
      throw ConfigError(".omega", "omega must lie in [1/m, 1/(m-1)]");
    }
    cfg.omega = w;
  }
  if (j.contains("overrides")) {
    const json& o = j["overrides"];
    if (!o.is_object()) throw ConfigError(".overrides", "overrides must be an object");
    auto positive = [&](const char* key) -> std::optional<std::int64_t> {
      if (!o.contains(key)) return std::nullopt;
      const std::string path = std::string(".overrides.") + key;
      std::int64_t v = detail::int64_at(o[key], path);
      if (v <= 0) throw ConfigError(path, "must be positive");
      return v;
    };
    if (auto v = positive("N")) cfg.N = *v;
    if (auto v = positive("ell")) cfg.ell = *v;
    if (o.contains("kmax")) {
      std::int64_t v = detail::int64_at(o["kmax"], ".overrides.kmax");
      if (v < 0 || v > static_cast<std::int64_t>(cfg.M.size())) {
        throw ConfigError(".overrides.kmax", "kmax must lie in [0, |M|]");
      }
      cfg.kmax = static_cast<int>(v);
    }
    if (auto v = positive("scan_cap")) cfg.scan_cap = static_cast<std::uint64_t>(*v);
    if (auto v = positive("refine_cap")) cfg.refine_cap = static_cast<int>(*v);
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError(".output_dir", "output_dir must be a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  cfg.ifs();
  return cfg;
}

}  // namespace dirifs
