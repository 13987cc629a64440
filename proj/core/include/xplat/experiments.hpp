#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xplat/estimators.hpp"
#include "xplat/kernel.hpp"
#include "xplat/readout.hpp"

namespace xplat {

enum class ExperimentKind {
  kGhzFidelity,
  kGhzPureFidelity,
  kTomography,
  kVarianceSweep,
  kCalibrate,
  kPhaseLearning,
  kOracleSuite,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& text);

/// One JSON document; unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kGhzFidelity;
  int n = 5;
  std::vector<int> parts;  // chain part sizes; empty = two equal halves
  EstimationBudget budget{9, 500, 0, 0};
  std::string ensemble = "exhaustive";  // "random" | "exhaustive"
  std::uint64_t seed = 42;
  std::string noise_model;     // CSV path; empty = none
  double readout_error = 0.0;  // uniform xi = eta when no file is given
  bool mitigation = false;
  bool distributed = false;
  int repetitions = 12;
  std::string repetition_mode = "independent";  // "independent" | "shared-ensemble"
  std::string output = "out";
  int calibration_rounds = 10000;

  // variance-sweep
  std::vector<int> n_values{2, 4, 6};
  std::vector<std::uint64_t> m_values{10, 100};
  int samples = 2000;

  // phase-learning
  int train_size = 8;
  int splits = 10;
  std::vector<int> train_sizes{4, 6, 8, 11};
  std::vector<std::uint64_t> shots_values;
  SvrParams svr;
  int vqe_layers = 3;
  int vqe_restarts = 2;

  nlohmann::json to_json() const;
  /// Throws ConfigError naming every problem found.
  static ExperimentConfig from_json(const nlohmann::json& j);
  void validate() const;

  /// Chain part sizes for the GHZ experiments.
  std::vector<int> chain() const;
  /// The readout model (noise file, else uniform readout_error); empty when noiseless.
  ReadoutNoiseModel readout_model() const;
};

ExperimentConfig load_config(const std::string& path);

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
  double yerr = 0.0;
  std::string series;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  ExperimentConfig config;
  std::map<std::string, std::vector<double>> repetitions;  // per-repetition values
  std::map<std::string, EstimateReport> aggregates;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<SeriesPoint> series;
  std::vector<CheckResult> checks;
  std::optional<std::string> error;
  double wall_clock_seconds = 0.0;

  bool all_checks_passed() const;
  /// Everything except the wall clock is a function of (config, seed).
  nlohmann::json to_json(bool include_wall_clock = true) const;
};

std::string library_version();
/// Fingerprint of the library sources taken at configure time.
std::string code_digest();

/// Runs the configured experiment. Harness failures are caught into `error`
/// with whatever was completed; configuration problems throw ConfigError.
RunReport run_experiment(const ExperimentConfig& config);

/// CSV with header "x,y,yerr,series", rows in report order.
std::string emit_plot_data(const RunReport& report);
/// Writes report.json and series.csv into `dir` (created if missing).
void write_report(const RunReport& report, const std::string& dir);

// ---------------------------------------------------------------- GHZ building blocks

struct GhzRepetition {
  EstimateReport overlap;
  EstimateReport purity_p;
  EstimateReport purity_q;
  EstimateReport fidelity;
  std::optional<double> f_hat_p;
  std::optional<double> f_hat_q;
  RecordSet records_p;
  RecordSet records_q;
  std::vector<std::string> transcript;
};

/// Seed of repetition r (repetition 0 of an independent run uses it too).
std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition);

/// One cross-platform GHZ estimate under `seed`, in-process or through two
/// platform processes. Both paths produce bit-identical numbers.
GhzRepetition ghz_repetition(const ExperimentConfig& config, std::uint64_t seed, std::uint64_t ensemble_seed,
                             bool distributed);

/// Overlap estimate through platform processes for repetition 0 of `config`.
EstimateReport run_distributed_estimate(const ExperimentConfig& config, std::vector<std::string>* transcript = nullptr);
/// The same estimate from in-process records.
EstimateReport run_inprocess_estimate(const ExperimentConfig& config);

/// Weighted least-squares slope of log(y) against log(x); empty weights = uniform.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights = {});

/// Root-mean-square error against `reference` of the mean of k repetitions,
/// averaged over every k-subset of `values` (closed form), for k = 1..R/2.
std::vector<SeriesPoint> error_vs_repetitions(const std::vector<double>& values, double reference,
                                              const std::string& label);

/// One log-log slope fitted jointly to several error_vs_repetitions series
/// (separate intercepts, weights 1/k).
double pooled_error_slope(const std::vector<std::vector<SeriesPoint>>& series);

}  // namespace xplat
