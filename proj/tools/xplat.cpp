// xplat: runs one experiment and writes report.json and series.csv.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
// 3 failed checks, 4 transport or protocol error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "xplat/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kChecks = 3, kTransport = 4 };

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool distributed = false;
  bool mitigate = false;
};

xplat::ExperimentConfig resolve(const std::string& experiment, const Flags& flags) {
  nlohmann::json j = nlohmann::json::object();
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw xplat::ConfigError("cannot open configuration '" + flags.config + "'");
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw xplat::ConfigError("configuration '" + flags.config + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw xplat::ConfigError("configuration must be a JSON object");
  }
  if (!j.contains("experiment")) j["experiment"] = experiment;
  if (j["experiment"] != experiment)
    throw xplat::ConfigError("configuration is for '" + j["experiment"].dump() + "', not '" + experiment + "'");
  if (flags.seed) j["seed"] = *flags.seed;
  if (!flags.out.empty()) j["output"] = flags.out;
  if (flags.distributed) j["distributed"] = true;
  if (flags.mitigate) j["mitigation"] = true;
  return xplat::ExperimentConfig::from_json(j);
}

int run(const std::string& experiment, const Flags& flags) {
  const xplat::ExperimentConfig config = resolve(experiment, flags);
  const xplat::RunReport report = xplat::run_experiment(config);
  xplat::write_report(report, config.output);

  for (const auto& [name, agg] : report.aggregates)
    std::printf("%-24s %.6f +- %.6f (%d repetitions)\n", name.c_str(), agg.value, agg.std_error, agg.repetitions);
  for (const auto& check : report.checks)
    std::printf("%s %s: %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(), check.detail.c_str());
  std::printf("report written to %s (%.1f s)\n", config.output.c_str(), report.wall_clock_seconds);

  if (report.error) {
    std::fprintf(stderr, "xplat: %s\n", report.error->c_str());
    return report.error->rfind("estimation", 0) == 0 ? kFailure : kTransport;
  }
  return report.all_checks_passed() ? kOk : kChecks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-platform fidelity estimation with circuit cutting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", xplat::library_version() + " (" + xplat::code_digest() + ")");

  Flags flags;
  std::string chosen;
  for (const char* name : {"ghz-fidelity", "ghz-pure-fidelity", "tomography", "variance-sweep", "calibrate",
                           "phase-learning", "oracle-suite"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    sub->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { flags.seed = s; }, "Master seed override");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_flag("--distributed", flags.distributed, "Run platforms as separate processes");
    sub->add_flag("--mitigate", flags.mitigate, "Enable cut and readout error mitigation");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    return run(chosen, flags);
  } catch (const xplat::ConfigError& e) {
    std::fprintf(stderr, "xplat: %s\n", e.what());
    return kConfig;
  } catch (const xplat::TransportError& e) {
    std::fprintf(stderr, "xplat: transport error: %s\n", e.what());
    return kTransport;
  } catch (const xplat::ProtocolError& e) {
    std::fprintf(stderr, "xplat: protocol error: %s\n", e.what());
    return kTransport;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "xplat: %s\n", e.what());
    return kFailure;
  }
}
