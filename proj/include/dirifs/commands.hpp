// SPDX-License-Identifier: Apache-2.0
#pragma once

// Command orchestration behind the CLI. Commands are pure: they take the raw
// config document and options and return the files to write, the text to
// print and an exit code. The CLI binary is the only place that touches disk.
//
// Exit codes: 0 ok, 1 usage or config, 2 degenerate IFS pair,
// 3 verification failure, 4 budget exhausted.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dirifs/config.hpp"
#include "dirifs/lemmas.hpp"

namespace dirifs {

enum ExitCode : int { kOk = 0, kConfig = 1, kDegenerate = 2, kVerifyFailed = 3, kBudget = 4 };

struct CommandOptions {
  std::optional<int> kmax;
  std::optional<std::uint64_t> Qmax;
  std::optional<std::string> grid;
  std::optional<int> k;
  int threads = 1;
  /// Contents of golden_<hash>.json from a previous run, if any.
  std::optional<json> golden;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandOutput {
  int exit_code = kOk;
  std::string out;  // stdout
  std::string err;  // stderr
  std::vector<OutputFile> files;
};

inline std::string golden_name(const RunConfig& cfg) { return "golden_" + cfg.hash() + ".json"; }

/// "a:b:count" (geometric, inclusive, rounded) or a comma-separated list.
inline std::vector<std::uint64_t> parse_grid(const std::string& spec) {
  auto number = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("--grid", "bad number '" + s + "' in grid spec");
    }
    if (used != s.size() || v == 0) throw ConfigError("--grid", "bad number '" + s + "' in grid spec");
    return v;
  };
  std::vector<std::uint64_t> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("--grid", "expected a:b:count");
    const std::uint64_t a = number(parts[0]);
    const std::uint64_t b = number(parts[1]);
    const std::uint64_t n = number(parts[2]);
    if (b < a || n < 2) throw ConfigError("--grid", "need a <= b and count >= 2");
    const double ratio = std::log(static_cast<double>(b) / static_cast<double>(a)) / static_cast<double>(n - 1);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto v = static_cast<std::uint64_t>(std::llround(static_cast<double>(a) * std::exp(ratio * static_cast<double>(i))));
      v = std::clamp(v, a, b);
      if (out.empty() || v > out.back()) out.push_back(v);
    }
    out.back() = b;
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw ConfigError("--grid", "empty grid");
  return out;
}

namespace detail {

inline std::string error_json(const std::string& kind, const std::string& message,
                              const std::map<std::string, json>& extra = {}) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  for (const auto& [key, v] : extra) j[key] = v;
  return j.dump() + "\n";
}

inline std::string log10_decimal(const Rational& x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", log_rational(x) / std::log(10.0));
  return buf;
}

inline std::string log10_decimal(const Integer& x) { return log10_decimal(Rational(x)); }

inline std::string decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ += ',';
      text_ += fields[i];
    }
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

inline int kmax_for(const RunConfig& cfg, const CommandOptions& opt) {
  int k = opt.kmax.value_or(cfg.kmax.value_or(static_cast<int>(cfg.M.size())));
  if (k < 0 || k > static_cast<int>(cfg.M.size())) throw ConfigError("--kmax", "kmax must lie in [0, |M|]");
  return k;
}

inline ScanOptions scan_options(const RunConfig& cfg, const CommandOptions& opt) {
  ScanOptions s;
  s.threads = opt.threads;
  s.cap = opt.Qmax.value_or(cfg.scan_cap);
  s.refine_cap = cfg.refine_cap;
  return s;
}

/// Merges new constants into the golden document; existing values must agree within a factor of 2.
inline void apply_golden(CommandOutput& out, const RunConfig& cfg, const CommandOptions& opt,
                         const std::map<std::string, Rational>& constants) {
  json doc = opt.golden.value_or(json::object());
  if (!doc.is_object()) doc = json::object();
  doc["config_hash"] = cfg.hash();
  json& consts = doc["constants"];
  if (!consts.is_object()) consts = json::object();
  std::vector<std::string> drift;
  for (const auto& [key, value] : constants) {
    if (consts.contains(key) && consts[key].is_string()) {
      const Rational old = Rational::parse(consts[key].get<std::string>());
      const bool same_sign = old.sign() == value.sign();
      const bool stable = old == value || (same_sign && !old.is_zero() && abs(value) <= abs(old) * 2 &&
                                           abs(old) <= abs(value) * 2);
      if (!stable) drift.push_back(key + ": " + old.str() + " -> " + value.str());
      continue;
    }
    consts[key] = value.str();
  }
  out.files.push_back({golden_name(cfg), doc.dump(2) + "\n"});
  if (!drift.empty()) {
    out.exit_code = kVerifyFailed;
    json j;
    j["error"] = "golden_drift";
    j["drift"] = drift;
    out.err += j.dump() + "\n";
  }
}

/// Parses the config and maps library exceptions to exit codes.
inline CommandOutput run_guarded(const json& raw, const std::function<void(const RunConfig&, CommandOutput&)>& body) {
  CommandOutput out;
  try {
    RunConfig cfg = RunConfig::from_json(raw);
    if (validate_pair(cfg.ifs()) == PairStatus::degenerate) {
      out.exit_code = kDegenerate;
      out.err = error_json("degenerate", "f and g share their fixed point " + cfg.ifs().f().fixed_point().str());
      return out;
    }
    body(cfg, out);
  } catch (const ConfigError& e) {
    out = {};
    out.exit_code = kConfig;
    out.err = error_json("config", e.what(), {{"path", e.path()}});
  } catch (const ScheduleInfeasible& e) {
    out = {};
    out.exit_code = kConfig;
    out.err = error_json("schedule_infeasible", e.what(), {{"path", ".M"}, {"j", e.j()}, {"k", e.k()}});
  } catch (const WordInfeasible& e) {
    out = {};
    out.exit_code = kConfig;
    out.err = error_json("word_infeasible", e.what(), {{"path", ".M"}, {"j", e.j()}, {"k", e.k()}});
  } catch (const LemmaViolation& e) {
    out = {};
    out.exit_code = kVerifyFailed;
    out.err = error_json("lemma_violation", e.what());
  } catch (const BudgetExceeded& e) {
    out.exit_code = kBudget;
    out.err += error_json("budget_exceeded", e.what(), {{"verified_prefix", e.verified_prefix()}});
  } catch (const TooWide& e) {
    out.exit_code = kBudget;
    out.err += error_json("too_wide", e.what(), {{"q", e.q()}});
  } catch (const NeedMoreDepth& e) {
    out.exit_code = kBudget;
    out.err += error_json("need_more_depth", e.what(), {{"required_k", e.required_k()}});
  } catch (const SearchExhausted& e) {
    out.exit_code = kBudget;
    out.err += error_json("search_exhausted", e.what());
  } catch (const ExactRationalPoint& e) {
    out.exit_code = kVerifyFailed;
    out.err += error_json("exact_rational_point", e.what());
  } catch (const Error& e) {
    out = {};
    out.exit_code = kConfig;
    out.err = error_json("invalid_argument", e.what());
  }
  return out;
}

inline Construction build_for(const RunConfig& cfg, const CommandOptions& opt) {
  return Construction::build(cfg.params(), kmax_for(cfg, opt), opt.threads);
}

}  // namespace detail

inline CommandOutput cmd_validate(const json& raw) {
  return detail::run_guarded(raw, [](const RunConfig& cfg, CommandOutput& out) {
    const IfsPair ifs = cfg.ifs();
    const long ell = cfg.ell.value_or(choose_ell(ifs));
    const GapChoice gap = find_N(ifs, ell);
    json j;
    j["status"] = "ok";
    j["ell"] = ell;
    j["N"] = cfg.N.value_or(gap.N);
    j["r_over_s"] = gap.r_over_s.str();
    j["config_hash"] = cfg.hash();
    out.out = j.dump() + "\n";
  });
}

inline CommandOutput cmd_construct(const json& raw, const CommandOptions& opt = {}) {
  return detail::run_guarded(raw, [&](const RunConfig& cfg, CommandOutput& out) {
    const Construction c = detail::build_for(cfg, opt);
    detail::Csv csv({"j", "k", "fk", "gjk", "eta", "len_t", "p", "q", "P", "S", "word_digest"});
    const auto& s = c.schedule();
    for (const auto& row : c.rows()) {
      Word address = row.v;
      address.append(Letter::F, static_cast<std::uint64_t>(c.N()));
      csv.row({std::to_string(row.j), std::to_string(row.k), std::to_string(s.f(row.k)),
               std::to_string(s.g(row.j, row.k)), std::to_string(row.k == 0 ? 0 : s.eta(row.j, row.k)),
               std::to_string(row.t.size()), row.p().get_str(), row.q().get_str(), row.P.get_str(), row.S.str(),
               word_digest(address)});
    }
    out.files.push_back({"construct.csv", csv.str()});
    json j;
    j["rows"] = c.rows().size();
    j["kmax"] = c.kmax();
    j["N"] = c.N();
    j["ell"] = c.ell();
    j["S"] = c.S().get_str();
    json lac = json::array();
    for (std::size_t i = 1; i < cfg.M.size(); ++i) {
      lac.push_back(detail::decimal(std::log(static_cast<double>(cfg.M[i])) / std::log(static_cast<double>(cfg.M[i - 1]))));
    }
    j["log_ratio_M"] = lac;
    out.out = j.dump() + "\n";
  });
}

inline CommandOutput cmd_verify(const json& raw, const CommandOptions& opt = {}) {
  return detail::run_guarded(raw, [&](const RunConfig& cfg, CommandOutput& out) {
    const Construction c = detail::build_for(cfg, opt);
    json report;
    report["config_hash"] = cfg.hash();
    report["kmax"] = c.kmax();
    json checks = json::array();
    bool all = true;
    for (const CheckResult& r : exact_checks(c)) {
      json e;
      e["name"] = r.name;
      e["passed"] = r.passed;
      e["cases"] = r.cases;
      if (!r.passed) e["counterexample"] = r.counterexample;
      checks.push_back(e);
      all = all && r.passed;
    }
    report["checks"] = checks;
    report["all_passed"] = all;
    const std::string text = report.dump(2) + "\n";
    out.files.push_back({"verify.json", text});
    out.out = text;
    if (!all) out.exit_code = kVerifyFailed;
  });
}

inline CommandOutput cmd_theta(const json& raw, const CommandOptions& opt = {}) {
  return detail::run_guarded(raw, [&](const RunConfig& cfg, CommandOutput& out) {
    const Construction c = detail::build_for(cfg, opt);
    detail::Csv csv({"k", "case", "Q", "q", "dist_lo", "dist_hi", "theta_lo", "theta_hi"});
    detail::Csv plot({"log10_Q", "log10_theta_hi"});
    json summary;
    summary["config_hash"] = cfg.hash();
    summary["c"] = cfg.c.str();
    json per_k = json::array();
    std::map<std::string, Rational> constants;
    bool integral = true;
    const int first = opt.k.value_or(1);
    const int last = opt.k.value_or(c.kmax() - 1);
    if (first < 1 || last > c.kmax() - 1 || first > last) throw NeedMoreDepth(first + 1, "theta needs rows through k+1");
    for (int k = first; k <= last; ++k) {
      const UpperBoundReport rep = upper_bound_check(c, k);
      for (const auto& smp : rep.samples) {
        csv.row({std::to_string(k), std::to_string(smp.case_id), smp.Q.get_str(), smp.q.get_str(), smp.dist.lo.str(),
                 smp.dist.hi.str(), smp.theta_lo.str(), smp.theta_hi.str()});
        plot.row({detail::log10_decimal(smp.Q), detail::log10_decimal(smp.theta_hi)});
      }
      json e;
      e["k"] = k;
      e["samples"] = rep.samples.size();
      e["ratio_max_lo"] = rep.ratio_max_lo.str();
      e["ratio_max_hi"] = rep.ratio_max_hi.str();
      e["case1_integrality"] = rep.case1_integrality;
      e["case2_integrality"] = rep.case2_integrality;
      per_k.push_back(e);
      integral = integral && rep.case1_integrality && rep.case2_integrality;
      constants["theta_ratio_k" + std::to_string(k)] = rep.ratio_max_hi;
    }
    summary["per_k"] = per_k;
    out.files.push_back({"theta.csv", csv.str()});
    out.files.push_back({"theta_loglog.csv", plot.str()});
    out.files.push_back({"theta.json", summary.dump(2) + "\n"});
    out.out = summary.dump() + "\n";
    detail::apply_golden(out, cfg, opt, constants);
    if (!integral) out.exit_code = kVerifyFailed;
  });
}

inline CommandOutput cmd_scan(const json& raw, const CommandOptions& opt = {}) {
  return detail::run_guarded(raw, [&](const RunConfig& cfg, CommandOutput& out) {
    const Construction c = detail::build_for(cfg, opt);
    const int k = opt.k.value_or(1);
    const ScanOptions sopt = detail::scan_options(cfg, opt);
    const LowerBoundReport rep = lower_bound_scan(c, k, sopt);
    std::vector<std::uint64_t> grid;
    for (std::uint64_t Q = 1; Q < rep.Q; Q *= 2) grid.push_back(Q);
    grid.push_back(rep.Q);
    detail::Csv csv({"Q", "best_q", "dist_lo", "dist_hi", "theta_lo", "theta_hi"});
    detail::Csv plot({"log10_Q", "log10_dist_lo"});
    for (const ScanResult& r : scan_min_grid(c.xi_enclosures(), grid, sopt)) {
      csv.row({std::to_string(r.Q), std::to_string(r.best_q), r.dist_lo.str(), r.dist_hi.str(), r.theta_lo.str(),
               r.theta_hi.str()});
      if (!r.dist_lo.is_zero()) {
        plot.row({detail::log10_decimal(Integer(static_cast<unsigned long>(r.Q))), detail::log10_decimal(r.dist_lo)});
      }
    }
    json j;
    j["config_hash"] = cfg.hash();
    j["k"] = k;
    j["Q"] = rep.Q;
    j["P_k"] = rep.P_k.get_str();
    j["best_q"] = rep.scan.best_q;
    j["dist_lo"] = rep.scan.dist_lo.str();
    j["dist_hi"] = rep.scan.dist_hi.str();
    j["c_prime_lo"] = rep.c_prime_lo.str();
    j["c_prime_lo_decimal"] = detail::decimal(rep.c_prime_lo.to_double());
    j["structural_ok"] = rep.structural_ok;
    j["structural_checked"] = rep.structural_checked;
    if (rep.first_failure) j["first_failure"] = *rep.first_failure;
    out.files.push_back({"scan.csv", csv.str()});
    out.files.push_back({"scan_loglog.csv", plot.str()});
    out.files.push_back({"scan.json", j.dump(2) + "\n"});
    out.out = j.dump() + "\n";
    detail::apply_golden(out, cfg, opt, {{"c_prime_k" + std::to_string(k), rep.c_prime_lo}});
    if (!rep.structural_ok || rep.c_prime_lo.sign() <= 0) out.exit_code = kVerifyFailed;
  });
}

inline CommandOutput cmd_liouville(const json& raw, const CommandOptions& opt = {}) {
  return detail::run_guarded(raw, [&](const RunConfig& cfg, CommandOutput& out) {
    const Construction c = detail::build_for(cfg, opt);
    detail::Csv csv({"k", "q", "dist_hi", "exponent_lo"});
    detail::Csv plot({"k", "exponent_lo"});
    json list = json::array();
    std::map<std::string, Rational> constants;
    bool monotone = true;
    std::optional<Rational> prev;
    for (const auto& w : liouville_witnesses(c, c.kmax() - 1)) {
      csv.row({std::to_string(w.k), w.q.get_str(), w.dist_hi.str(), w.exponent_lo.str()});
      plot.row({std::to_string(w.k), detail::decimal(w.exponent_lo.to_double())});
      json e;
      e["k"] = w.k;
      e["exponent_lo"] = w.exponent_lo.str();
      e["exponent_lo_decimal"] = detail::decimal(w.exponent_lo.to_double());
      list.push_back(e);
      constants["liouville_exponent_k" + std::to_string(w.k)] = w.exponent_lo;
      if (prev && w.exponent_lo < *prev) monotone = false;
      prev = w.exponent_lo;
    }
    json j;
    j["config_hash"] = cfg.hash();
    j["witnesses"] = list;
    j["nondecreasing"] = monotone;
    out.files.push_back({"liouville.csv", csv.str()});
    out.files.push_back({"liouville_plot.csv", plot.str()});
    out.files.push_back({"liouville.json", j.dump(2) + "\n"});
    out.out = j.dump() + "\n";
    detail::apply_golden(out, cfg, opt, constants);
  });
}

inline CommandOutput cmd_omega(const json& raw, const CommandOptions& opt = {}) {
  return detail::run_guarded(raw, [&](const RunConfig& cfg, CommandOutput& out) {
    const Construction c = detail::build_for(cfg, opt);
    std::vector<DirichletSample> samples;
    std::string source;
    if (opt.grid) {
      samples = scan_samples(c.xi_enclosures(), parse_grid(*opt.grid), detail::scan_options(cfg, opt));
      source = "scan";
    } else {
      const WitnessTable witnesses = WitnessTable::build(c);
      for (const Integer& Q : critical_grid(c, 1, c.kmax() - 1)) {
        samples.push_back(structural_dirichlet_bracket(c, Q, witnesses));
      }
      source = "structural";
    }
    detail::Csv csv({"Q", "D_lo", "D_hi"});
    detail::Csv plot({"log10_Q", "log10_D_lo", "log10_D_hi"});
    for (const auto& s : samples) {
      csv.row({s.Q.get_str(), s.lo.str(), s.hi.str()});
      plot.row({detail::log10_decimal(s.Q), s.lo.is_zero() ? "-inf" : detail::log10_decimal(s.lo),
                s.hi.is_zero() ? "-inf" : detail::log10_decimal(s.hi)});
    }
    out.files.push_back({"omega.csv", csv.str()});
    out.files.push_back({"omega_loglog.csv", plot.str()});
    const SlopeBracket fit = omega_hat_fit(samples);
    json j;
    j["config_hash"] = cfg.hash();
    j["source"] = source;
    j["samples"] = samples.size();
    j["slope_lo"] = fit.lo.str();
    j["slope_hi"] = fit.hi.str();
    j["slope_lo_decimal"] = detail::decimal(fit.lo_decimal);
    j["slope_hi_decimal"] = detail::decimal(fit.hi_decimal);
    if (cfg.omega) j["omega"] = cfg.omega->str();
    out.files.push_back({"omega.json", j.dump(2) + "\n"});
    out.out = j.dump() + "\n";
    detail::apply_golden(out, cfg, opt, {{"omega_slope_lo", fit.lo}, {"omega_slope_hi", fit.hi}});
  });
}

/// Diagonal demo; m comes from the config when one is given, otherwise 2.
inline CommandOutput cmd_demo_diagonal(const std::optional<json>& raw, const CommandOptions& opt = {}) {
  CommandOutput out;
  int m = 2;
  ScanOptions sopt;
  sopt.threads = opt.threads;
  if (opt.Qmax) sopt.cap = std::max(sopt.cap, *opt.Qmax);
  try {
    if (raw) {
      RunConfig cfg = RunConfig::from_json(*raw);
      m = cfg.m;
      sopt.cap = opt.Qmax.value_or(cfg.scan_cap);
    }
    std::vector<std::uint64_t> grid = opt.grid ? parse_grid(*opt.grid)
                                               : std::vector<std::uint64_t>{10, 100, 1000, 10000, 100000};
    const DiagonalReport rep = diagonal_demo(m, grid, sopt);
    detail::Csv csv({"Q", "q", "dist_lo", "dist_hi", "certified"});
    for (const auto& p : rep.points) {
      csv.row({std::to_string(p.Q), std::to_string(p.q), p.dist_lo.str(), p.dist_hi.str(), p.certified ? "1" : "0"});
    }
    json j;
    j["m"] = m;
    j["points"] = rep.points.size();
    j["all_certified"] = rep.all_certified;
    out.files.push_back({"diagonal.csv", csv.str()});
    out.files.push_back({"diagonal.json", j.dump(2) + "\n"});
    out.out = j.dump() + "\n";
    if (!rep.all_certified) out.exit_code = kVerifyFailed;
  } catch (const ConfigError& e) {
    out = {};
    out.exit_code = kConfig;
    out.err = detail::error_json("config", e.what(), {{"path", e.path()}});
  } catch (const BudgetExceeded& e) {
    out = {};
    out.exit_code = kBudget;
    out.err = detail::error_json("budget_exceeded", e.what(), {{"verified_prefix", e.verified_prefix()}});
  } catch (const Error& e) {
    out = {};
    out.exit_code = kConfig;
    out.err = detail::error_json("invalid_argument", e.what());
  }
  return out;
}

}  // namespace dirifs
