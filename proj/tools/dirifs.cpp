// SPDX-License-Identifier: Apache-2.0
// dirifs: construct and verify Dirichlet-improvable Liouville vectors in IFS attractors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dirifs/commands.hpp"

namespace fs = std::filesystem;
using namespace dirifs;

namespace {

std::optional<json> read_json(const std::string& path, std::string& error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    error = "cannot open '" + path + "'";
    return std::nullopt;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    error = std::string("malformed JSON in '") + path + "': " + e.what();
    return std::nullopt;
  }
}

int emit(const CommandOutput& out, const std::string& dir) {
  if (!out.files.empty()) {
    fs::create_directories(dir);
    for (const auto& f : out.files) {
      std::ofstream file(fs::path(dir) / f.name, std::ios::binary | std::ios::trunc);
      file << f.content;
      if (!file) {
        std::cerr << "{\"error\":\"io\",\"message\":\"cannot write " << f.name << "\"}\n";
        return kConfig;
      }
    }
  }
  std::cout << out.out;
  std::cerr << out.err;
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-improvable Liouville vectors in rational IFS attractors"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<int> kmax;
  std::optional<std::uint64_t> Qmax;
  std::optional<std::string> grid;
  std::optional<int> k;
  int threads = 1;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
    if (config_required) opt->required();
    sub->add_option("--out", out_dir, "output directory (default: config output_dir or ./out)");
    sub->add_option("--kmax", kmax, "schedule depth");
    sub->add_option("--Qmax", Qmax, "scan cap");
    sub->add_option("--grid", grid, "Q grid: a:b:count or a comma list");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "check the IFS pair and report N, ell and r/s"},
      {"construct", "write the approximant table"},
      {"verify", "run the exact lemma checks"},
      {"theta", "witness-based Dirichlet constant samples"},
      {"scan", "certified lower-bound scan below P_k*"},
      {"liouville", "Liouville witnesses and exponents"},
      {"omega", "uniform exponent slope fit"},
      {"demo-diagonal", "diagonal IFS demo"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs[name] = app.add_subcommand(name, help);
    add_common(subs[name], name != "demo-diagonal");
  }
  subs["scan"]->add_option("--k", k, "level k (default 1)");
  subs["theta"]->add_option("--k", k, "single level k (default: all available)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfig;
  }

  std::optional<json> raw;
  if (!config_path.empty()) {
    std::string error;
    raw = read_json(config_path, error);
    if (!raw) {
      std::cerr << json{{"error", "config"}, {"message", error}, {"path", ""}}.dump() << "\n";
      return kConfig;
    }
  }

  CommandOptions opt;
  opt.kmax = kmax;
  opt.Qmax = Qmax;
  opt.grid = grid;
  opt.k = k;
  opt.threads = threads;

  std::optional<RunConfig> cfg;
  if (raw) {
    try {
      cfg = RunConfig::from_json(*raw);
    } catch (const Error&) {
      // Reported by the command itself.
    }
  }
  if (out_dir.empty()) out_dir = (cfg && cfg->output_dir) ? *cfg->output_dir : "out";
  if (cfg) {
    const fs::path golden = fs::path(out_dir) / golden_name(*cfg);
    if (fs::exists(golden)) {
      std::string error;
      opt.golden = read_json(golden.string(), error);
    }
  }

  const std::string name = app.get_subcommands().front()->get_name();
  CommandOutput out;
  if (name == "validate") {
    out = cmd_validate(*raw);
  } else if (name == "construct") {
    out = cmd_construct(*raw, opt);
  } else if (name == "verify") {
    out = cmd_verify(*raw, opt);
  } else if (name == "theta") {
    out = cmd_theta(*raw, opt);
  } else if (name == "scan") {
    out = cmd_scan(*raw, opt);
  } else if (name == "liouville") {
    out = cmd_liouville(*raw, opt);
  } else if (name == "omega") {
    out = cmd_omega(*raw, opt);
  } else {
    out = cmd_demo_diagonal(raw, opt);
  }
  return emit(out, out_dir);
}
