#include "xplat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <set>
#include <thread>

#include "xplat/harness.hpp"
#include "xplat/mitigation.hpp"
#include "xplat/oracles.hpp"
#include "xplat/platform.hpp"
#include "xplat/protocol.hpp"

#ifndef XPLAT_VERSION
#define XPLAT_VERSION "0.0.0"
#endif
#ifndef XPLAT_CODE_DIGEST
#define XPLAT_CODE_DIGEST "unknown"
#endif

namespace xplat {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& experiment_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::kGhzFidelity, "ghz-fidelity"},     {ExperimentKind::kGhzPureFidelity, "ghz-pure-fidelity"},
      {ExperimentKind::kTomography, "tomography"},        {ExperimentKind::kVarianceSweep, "variance-sweep"},
      {ExperimentKind::kCalibrate, "calibrate"},          {ExperimentKind::kPhaseLearning, "phase-learning"},
      {ExperimentKind::kOracleSuite, "oracle-suite"},
  };
  return names;
}

bool is_ghz(ExperimentKind kind) {
  return kind == ExperimentKind::kGhzFidelity || kind == ExperimentKind::kGhzPureFidelity ||
         kind == ExperimentKind::kTomography || kind == ExperimentKind::kCalibrate;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : experiment_names())
    if (k == kind) return name;
  return "?";
}

ExperimentKind experiment_from_string(const std::string& text) {
  for (const auto& [k, name] : experiment_names())
    if (name == text) return k;
  throw ConfigError("unknown experiment '" + text + "'");
}

// ---------------------------------------------------------------- configuration

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{
      {"experiment", xplat::to_string(experiment)},
      {"n", n},
      {"parts", parts},
      {"budget", {{"N", budget.N}, {"m", budget.m}, {"L", budget.L}, {"T", budget.T}}},
      {"ensemble", ensemble},
      {"seed", seed},
      {"noise_model", noise_model},
      {"readout_error", readout_error},
      {"mitigation", mitigation},
      {"distributed", distributed},
      {"repetitions", repetitions},
      {"repetition_mode", repetition_mode},
      {"output", output},
      {"calibration_rounds", calibration_rounds},
      {"n_values", n_values},
      {"m_values", m_values},
      {"samples", samples},
      {"train_size", train_size},
      {"splits", splits},
      {"train_sizes", train_sizes},
      {"shots_values", shots_values},
      {"svr", {{"C", svr.C}, {"epsilon", svr.epsilon}}},
      {"vqe", {{"layers", vqe_layers}, {"restarts", vqe_restarts}}},
  };
  return j;
}

namespace {

class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& errors) : errors_(errors) {}

  template <typename T>
  void read(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(where + key + ": wrong type");
    }
  }

  void unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) errors_.push_back(where + key + ": unknown key");
  }

 private:
  std::vector<std::string>& errors_;
};

void check_unsigned(const nlohmann::json& j, const char* key, std::vector<std::string>& errors, const std::string& where) {
  if (j.contains(key) && j.at(key).is_number_integer() && j.at(key).get<long long>() < 0)
    errors.push_back(where + key + ": must be non-negative");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  std::vector<std::string> errors;
  FieldReader r(errors);
  r.unknown(j,
            {"experiment", "n", "parts", "budget", "ensemble", "seed", "noise_model", "readout_error", "mitigation",
             "distributed", "repetitions", "repetition_mode", "output", "calibration_rounds", "n_values", "m_values",
             "samples", "train_size", "splits", "train_sizes", "shots_values", "svr", "vqe"},
            "");
  ExperimentConfig c;
  if (!j.contains("experiment")) errors.push_back("experiment: required");
  std::string experiment;
  r.read(j, "experiment", experiment, "");
  if (!experiment.empty()) {
    try {
      c.experiment = experiment_from_string(experiment);
    } catch (const ConfigError& e) {
      errors.push_back(std::string("experiment: ") + e.what());
    }
  }
  for (const char* key : {"seed", "m_values", "shots_values"}) check_unsigned(j, key, errors, "");
  r.read(j, "n", c.n, "");
  r.read(j, "parts", c.parts, "");
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    if (!b.is_object()) {
      errors.push_back("budget: must be an object");
    } else {
      r.unknown(b, {"N", "m", "L", "T"}, "budget.");
      check_unsigned(b, "m", errors, "budget.");
      r.read(b, "N", c.budget.N, "budget.");
      r.read(b, "m", c.budget.m, "budget.");
      r.read(b, "L", c.budget.L, "budget.");
      r.read(b, "T", c.budget.T, "budget.");
    }
  }
  r.read(j, "ensemble", c.ensemble, "");
  r.read(j, "seed", c.seed, "");
  r.read(j, "noise_model", c.noise_model, "");
  r.read(j, "readout_error", c.readout_error, "");
  r.read(j, "mitigation", c.mitigation, "");
  r.read(j, "distributed", c.distributed, "");
  r.read(j, "repetitions", c.repetitions, "");
  r.read(j, "repetition_mode", c.repetition_mode, "");
  r.read(j, "output", c.output, "");
  r.read(j, "calibration_rounds", c.calibration_rounds, "");
  r.read(j, "n_values", c.n_values, "");
  r.read(j, "m_values", c.m_values, "");
  r.read(j, "samples", c.samples, "");
  r.read(j, "train_size", c.train_size, "");
  r.read(j, "splits", c.splits, "");
  r.read(j, "train_sizes", c.train_sizes, "");
  r.read(j, "shots_values", c.shots_values, "");
  if (j.contains("svr")) {
    const auto& s = j.at("svr");
    if (!s.is_object()) {
      errors.push_back("svr: must be an object");
    } else {
      r.unknown(s, {"C", "epsilon"}, "svr.");
      r.read(s, "C", c.svr.C, "svr.");
      r.read(s, "epsilon", c.svr.epsilon, "svr.");
    }
  }
  if (j.contains("vqe")) {
    const auto& v = j.at("vqe");
    if (!v.is_object()) {
      errors.push_back("vqe: must be an object");
    } else {
      r.unknown(v, {"layers", "restarts"}, "vqe.");
      r.read(v, "layers", c.vqe_layers, "vqe.");
      r.read(v, "restarts", c.vqe_restarts, "vqe.");
    }
  }
  if (!errors.empty()) throw ConfigError("invalid configuration: " + join(errors));
  c.validate();
  return c;
}

std::vector<int> ExperimentConfig::chain() const {
  if (!parts.empty()) return parts;
  return {(n + 1) / 2, (n + 1) / 2};
}

ReadoutNoiseModel ExperimentConfig::readout_model() const {
  if (!noise_model.empty()) {
    ReadoutNoiseModel m = load_noise_model(noise_model);
    if (m.num_qubits() != n) throw ConfigError("noise model covers " + std::to_string(m.num_qubits()) + " qubits, expected " + std::to_string(n));
    return m;
  }
  if (readout_error > 0.0) return ReadoutNoiseModel::uniform(n, readout_error, readout_error);
  return {};
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  if (n < 2 || n > kMaxQubits) errors.push_back("n: must lie in [2, " + std::to_string(kMaxQubits) + "]");
  if (is_ghz(experiment) && n % 2 == 0 && parts.empty()) errors.push_back("n: must be odd for GHZ experiments");
  if (!parts.empty()) {
    int width = 1;
    for (int k : parts) {
      if (k < 2 || k > 8) errors.push_back("parts: sizes must lie in [2, 8]");
      width += k - 1;
    }
    if (width != n) errors.push_back("parts: chain width " + std::to_string(width) + " differs from n");
  } else if (n < 3 && (is_ghz(experiment) || experiment == ExperimentKind::kPhaseLearning)) {
    errors.push_back("n: a cut chain needs n >= 3");
  }
  if (budget.N < 1) errors.push_back("budget.N: must be >= 1");
  if (budget.L < 0) errors.push_back("budget.L: must be >= 0");
  if (budget.T < 0) errors.push_back("budget.T: must be >= 0");
  if (budget.m == 1) errors.push_back("budget.m: must be 0 (exact) or >= 2");
  if (distributed && budget.m == 0) errors.push_back("budget.m: distributed runs need shots");
  if (ensemble != "random" && ensemble != "exhaustive") errors.push_back("ensemble: must be 'random' or 'exhaustive'");
  if (repetitions < 1) errors.push_back("repetitions: must be >= 1");
  if (repetition_mode != "independent" && repetition_mode != "shared-ensemble")
    errors.push_back("repetition_mode: must be 'independent' or 'shared-ensemble'");
  if (!noise_model.empty() && !std::filesystem::exists(noise_model))
    errors.push_back("noise_model: file '" + noise_model + "' does not exist");
  if (readout_error < 0.0 || readout_error >= 0.5) errors.push_back("readout_error: must lie in [0, 0.5)");
  if (calibration_rounds < 0) errors.push_back("calibration_rounds: must be >= 0");
  if (distributed && mitigation && calibration_rounds == 0)
    errors.push_back("calibration_rounds: distributed calibration needs sampled rounds");
  if (mitigation && budget.L > 0) errors.push_back("mitigation: needs enumerated configurations (budget.L = 0)");
  if (experiment == ExperimentKind::kTomography && mitigation) errors.push_back("mitigation: not supported for tomography");
  if (output.empty()) errors.push_back("output: must not be empty");
  if (experiment == ExperimentKind::kVarianceSweep) {
    if (n_values.empty() || m_values.empty()) errors.push_back("n_values/m_values: must not be empty");
    for (int k : n_values)
      if (k < 1 || k > 10) errors.push_back("n_values: entries must lie in [1, 10]");
    for (auto m : m_values)
      if (m < 1) errors.push_back("m_values: entries must be >= 1");
    if (samples < 2) errors.push_back("samples: must be >= 2");
  }
  if (experiment == ExperimentKind::kPhaseLearning) {
    const auto grid = static_cast<int>(phase_h_grid().size());
    if (train_size < 2 || train_size > grid) errors.push_back("train_size: must lie in [2, 21]");
    for (int t : train_sizes)
      if (t < 2 || t > grid) errors.push_back("train_sizes: entries must lie in [2, 21]");
    if (splits < 1) errors.push_back("splits: must be >= 1");
    if (budget.m == 0) errors.push_back("budget.m: the federated kernel needs shots");
    for (auto m : shots_values)
      if (m < 1) errors.push_back("shots_values: entries must be >= 1");
    if (svr.C <= 0.0 || svr.epsilon < 0.0) errors.push_back("svr: needs C > 0 and epsilon >= 0");
    if (vqe_layers < 1 || vqe_restarts < 0) errors.push_back("vqe: needs layers >= 1 and restarts >= 0");
  }
  if (!errors.empty()) throw ConfigError("invalid configuration: " + join(errors));
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("configuration '" + path + "' is not valid JSON: " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

// ---------------------------------------------------------------- reports

bool RunReport::all_checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string library_version() { return XPLAT_VERSION; }
std::string code_digest() { return XPLAT_CODE_DIGEST; }

nlohmann::json RunReport::to_json(bool include_wall_clock) const {
  nlohmann::json j;
  j["experiment"] = xplat::to_string(config.experiment);
  j["config"] = config.to_json();
  j["repetitions"] = repetitions;
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [name, rep] : aggregates) agg[name] = rep.to_json();
  j["aggregates"] = agg;
  j["metrics"] = metrics;
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) checks_json.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks_json;
  j["error"] = error ? nlohmann::json(*error) : nlohmann::json(nullptr);
  j["version"] = library_version();
  j["code_digest"] = code_digest();
  if (include_wall_clock) j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

std::string emit_plot_data(const RunReport& report) {
  std::string out = "x,y,yerr,series\n";
  char buf[128];
  for (const auto& p : report.series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", p.x, p.y, p.yerr);
    out += buf + p.series + "\n";
  }
  return out;
}

void write_report(const RunReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream out(base / "report.json");
    if (!out) throw Error("cannot write " + (base / "report.json").string());
    out << report.to_json().dump(2) << '\n';
  }
  std::ofstream csv(base / "series.csv");
  if (!csv) throw Error("cannot write " + (base / "series.csv").string());
  csv << emit_plot_data(report);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs at least two matching points");
  if (!weights.empty() && weights.size() != x.size()) throw InvalidArgument("one weight per point");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw InvalidArgument("log-log slope needs positive values");
    const double w = weights.empty() ? 1.0 : weights[i];
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sw += w;
    sx += w * lx;
    sy += w * ly;
    sxx += w * lx * lx;
    sxy += w * lx * ly;
  }
  return (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
}

std::vector<SeriesPoint> error_vs_repetitions(const std::vector<double>& values, double reference,
                                              const std::string& label) {
  const auto r = static_cast<double>(values.size());
  if (values.size() < 4) throw InvalidArgument("error scaling needs at least four repetitions");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / r;
  double spread = 0.0;
  for (double v : values) spread += (v - mean) * (v - mean);
  spread /= r;
  const double bias = mean - reference;
  std::vector<SeriesPoint> out;
  for (std::size_t k = 1; 2 * k <= values.size(); ++k) {
    const auto kd = static_cast<double>(k);
    out.push_back({kd, std::sqrt(bias * bias + spread * (r - kd) / (kd * (r - 1.0))), 0.0, label});
  }
  return out;
}

double pooled_error_slope(const std::vector<std::vector<SeriesPoint>>& series) {
  double sxx = 0.0, sxy = 0.0;
  for (const auto& points : series) {
    double sw = 0, sx = 0, sy = 0;
    for (const auto& p : points) {
      if (p.x <= 0.0 || p.y <= 0.0) throw InvalidArgument("log-log slope needs positive values");
      sw += 1.0 / p.x;
      sx += std::log(p.x) / p.x;
      sy += std::log(p.y) / p.x;
    }
    for (const auto& p : points) {
      const double dx = std::log(p.x) - sx / sw, dy = std::log(p.y) - sy / sw;
      sxx += dx * dx / p.x;
      sxy += dx * dy / p.x;
    }
  }
  if (sxx <= 0.0) throw InvalidArgument("error scaling needs at least two distinct k");
  return sxy / sxx;
}

// ---------------------------------------------------------------- GHZ building blocks

std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition) {
  return derive_seed(master_seed, StreamKey{0, 0, 0, static_cast<std::uint32_t>(repetition), StreamPurpose::kRepetition, 0});
}

namespace {

std::vector<CircuitSetting> merged_settings(const CutPlan& plan, std::span<const GlobalConfig> a,
                                            std::span<const GlobalConfig> b) {
  std::vector<CircuitSetting> out = required_settings(plan, a);
  for (const auto& s : required_settings(plan, b))
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  return out;
}

int cut_qubit(const CutPlan& plan) {
  const Cut& cut = plan.cut(0);
  return plan.part(cut.source_part).global_qubits[static_cast<std::size_t>(cut.source_wire)];
}

double local_calibration(const PlatformProgram& program, std::uint32_t platform, int rounds, std::uint64_t seed) {
  if (rounds > 0) return platform_calibration(program, platform, rounds, seed);
  const ReadoutNoiseModel model =
      program.readout.xi.empty() ? ReadoutNoiseModel::uniform(program.plan.n(), 0.0, 0.0) : program.readout;
  return calibrate_f_exact(model, cut_qubit(program.plan)).f_hat;
}

}  // namespace

GhzRepetition ghz_repetition(const ExperimentConfig& config, std::uint64_t seed, std::uint64_t ensemble_seed,
                             bool distributed) {
  const CutCircuit cc = ghz_chain(config.chain());
  const CutPlan& plan = cc.plan;
  const ReadoutNoiseModel model = config.readout_model();
  const PlatformProgram program{plan, cc.circuits, model, {}};
  const SchemeSpec spec{plan.output_sizes(), config.budget.N, ensemble_seed, config.ensemble};
  const MeasurementScheme scheme = spec.build();
  const CutConfigTable table = cut_config_table();

  std::vector<GlobalConfig> configs_p, configs_q;
  if (config.budget.L == 0) {
    configs_p = configs_q = enumerate_global_configs(plan, table);
  } else {
    Rng rp(seed, StreamKey{1, 0, 0, 0, StreamPurpose::kBernoulli, 0});
    Rng rq(seed, StreamKey{2, 0, 0, 0, StreamPurpose::kBernoulli, 0});
    configs_p = sample_global_configs(plan, table, config.budget.L, rp);
    configs_q = sample_global_configs(plan, table, config.budget.L, rq);
  }
  const std::vector<Job> jobs = plan_jobs(merged_settings(plan, configs_p, configs_q), scheme, config.budget.m);

  GhzRepetition rep;
  const int rounds = config.mitigation ? config.calibration_rounds : 0;
  if (distributed) {
    SessionOptions options;
    options.master_seed = seed;
    options.scheme = spec;
    options.calibration_rounds = rounds;
    SessionResult s1 = run_platform_session(program, 1, jobs, options);
    SessionResult s2 = run_platform_session(program, 2, jobs, options);
    rep.records_p = std::move(s1.records);
    rep.records_q = std::move(s2.records);
    rep.f_hat_p = s1.f_hat;
    rep.f_hat_q = s2.f_hat;
    rep.transcript = std::move(s1.transcript);
    rep.transcript.insert(rep.transcript.end(), s2.transcript.begin(), s2.transcript.end());
  } else {
    rep.records_p = collect_records(program, scheme, 1, jobs, seed);
    rep.records_q = collect_records(program, scheme, 2, jobs, seed);
    if (config.mitigation) {
      rep.f_hat_p = local_calibration(program, 1, rounds, seed);
      rep.f_hat_q = local_calibration(program, 2, rounds, seed);
    }
  }

  const bool correct_readout = config.mitigation && !model.xi.empty();
  const ReadoutCorrection correction{correct_readout ? &model : nullptr, correct_readout ? &model : nullptr};
  Rng split_p(seed, StreamKey{1, 0, 0, 0, StreamPurpose::kShotSplit, 0});
  Rng split_q(seed, StreamKey{2, 0, 0, 0, StreamPurpose::kShotSplit, 0});
  if (config.mitigation) {
    rep.overlap = em_cut_estimate(rep.records_p, rep.records_q, plan, scheme.ensemble, *rep.f_hat_p, *rep.f_hat_q, correction);
    const CutConfigTable tp = cut_config_table(1, *rep.f_hat_p), tq = cut_config_table(1, *rep.f_hat_q);
    const auto gp = enumerate_global_configs(plan, tp), gq = enumerate_global_configs(plan, tq);
    rep.purity_p = purity_estimate(rep.records_p, plan, tp, scheme.ensemble, gp, split_p, correction.p);
    rep.purity_q = purity_estimate(rep.records_q, plan, tq, scheme.ensemble, gq, split_q, correction.q);
  } else {
    rep.overlap = multi_cut_estimate(rep.records_p, rep.records_q, plan, table, scheme.ensemble, configs_p, configs_q);
    rep.purity_p = purity_estimate(rep.records_p, plan, table, scheme.ensemble, configs_p, split_p);
    rep.purity_q = purity_estimate(rep.records_q, plan, table, scheme.ensemble, configs_q, split_q);
  }
  rep.fidelity = cross_platform_fidelity(rep.overlap, rep.purity_p, rep.purity_q);
  return rep;
}

EstimateReport run_distributed_estimate(const ExperimentConfig& config, std::vector<std::string>* transcript) {
  GhzRepetition rep = ghz_repetition(config, config.seed, config.seed, true);
  if (transcript != nullptr) *transcript = std::move(rep.transcript);
  return rep.overlap;
}

EstimateReport run_inprocess_estimate(const ExperimentConfig& config) {
  return ghz_repetition(config, config.seed, config.seed, false).overlap;
}

// ---------------------------------------------------------------- experiments

namespace {

void add_repetition_series(RunReport& report, const std::string& name, const std::vector<double>& values,
                           const std::vector<double>& errors) {
  for (std::size_t r = 0; r < values.size(); ++r)
    report.series.push_back({static_cast<double>(r), values[r], r < errors.size() ? errors[r] : 0.0, name});
}

void aggregate_all(RunReport& report, const EstimationBudget& budget) {
  for (const auto& [name, values] : report.repetitions)
    if (!values.empty()) report.aggregates[name] = aggregate_repetitions(values, budget);
}

std::uint64_t ensemble_seed_for(const ExperimentConfig& config, std::uint64_t rep_seed) {
  return config.repetition_mode == "shared-ensemble" ? config.seed : rep_seed;
}

void run_ghz_fidelity(const ExperimentConfig& config, RunReport& report) {
  std::map<std::string, std::vector<double>> errors;
  std::size_t lines = 0, violations = 0;
  auto run_one = [&config](int r) {
    const std::uint64_t seed = repetition_seed(config.seed, r);
    return ghz_repetition(config, seed, ensemble_seed_for(config, seed), config.distributed);
  };
  // In-process repetitions run concurrently; platform sessions run one at a time.
  std::vector<std::future<GhzRepetition>> pending;
  if (!config.distributed && std::thread::hardware_concurrency() > 1)
    for (int r = 0; r < config.repetitions; ++r) pending.push_back(std::async(std::launch::async, run_one, r));
  for (int r = 0; r < config.repetitions; ++r) {
    const GhzRepetition rep = pending.empty() ? run_one(r) : pending[static_cast<std::size_t>(r)].get();
    for (const auto& [name, est] : {std::pair<std::string, const EstimateReport*>{"overlap", &rep.overlap},
                                    {"purity_p", &rep.purity_p},
                                    {"purity_q", &rep.purity_q},
                                    {"fidelity", &rep.fidelity}}) {
      report.repetitions[name].push_back(est->value);
      errors[name].push_back(est->std_error);
    }
    if (rep.f_hat_p) {
      report.repetitions["f_hat_p"].push_back(*rep.f_hat_p);
      report.repetitions["f_hat_q"].push_back(*rep.f_hat_q);
    }
    lines += rep.transcript.size();
    violations += transcript_violations(rep.transcript);
  }
  aggregate_all(report, config.budget);
  for (const char* name : {"overlap", "fidelity"}) add_repetition_series(report, name, report.repetitions[name], errors[name]);
  if (config.repetitions >= 4 && config.readout_model().is_noiseless()) {
    const auto err = error_vs_repetitions(report.repetitions["overlap"], 1.0, "overlap_error_vs_repetitions");
    report.series.insert(report.series.end(), err.begin(), err.end());
    report.metrics["error_slope"] = pooled_error_slope({err});
  }
  if (config.distributed) {
    report.metrics["transcript_lines"] = lines;
    report.metrics["transcript_violations"] = violations;
  }
}

void run_ghz_pure_fidelity(const ExperimentConfig& config, RunReport& report) {
  const CutCircuit cc = ghz_chain(config.chain());
  const CutPlan& plan = cc.plan;
  const ReadoutNoiseModel model = config.readout_model();
  const PlatformProgram program{plan, cc.circuits, model, {}};
  const StabilizerGroup group = ghz_stabilizers(config.n);
  const SchemeSpec spec{plan.output_sizes(), 1, config.seed, "ghz-stabilizer"};
  const MeasurementScheme scheme = spec.build();
  const CutConfigTable table = cut_config_table();
  const auto configs = enumerate_global_configs(plan, table);
  const auto settings = required_settings(plan, configs);
  for (int r = 0; r < config.repetitions; ++r) {
    const std::uint64_t seed = repetition_seed(config.seed, r);
    std::vector<int> sampled;
    if (config.budget.T == 0) {
      sampled.resize(group.elements.size());
      std::iota(sampled.begin(), sampled.end(), 0);
    } else {
      Rng rng(seed, StreamKey{0, 0, 0, 0, StreamPurpose::kStabilizerSample, 0});
      for (int t = 0; t < config.budget.T; ++t) sampled.push_back(static_cast<int>(rng.below(group.elements.size())));
    }
    std::vector<int> unique = sampled;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    const auto jobs = plan_jobs(settings, scheme, config.budget.m, unique);
    RecordSet records;
    std::optional<double> f_hat;
    const int rounds = config.mitigation ? config.calibration_rounds : 0;
    if (config.distributed) {
      SessionOptions options;
      options.master_seed = seed;
      options.scheme = spec;
      options.calibration_rounds = rounds;
      SessionResult s = run_platform_session(program, 1, jobs, options);
      records = std::move(s.records);
      f_hat = s.f_hat;
      report.metrics["transcript_violations"] =
          report.metrics.value("transcript_violations", std::size_t{0}) + transcript_violations(s.transcript);
    } else {
      records = collect_records(program, scheme, 1, jobs, seed);
      if (config.mitigation) f_hat = local_calibration(program, 1, rounds, seed);
    }
    report.repetitions["raw"].push_back(pure_state_fidelity_estimate(records, plan, table, group, sampled, configs).value);
    if (config.mitigation) {
      const ReadoutNoiseModel* correction = model.xi.empty() ? nullptr : &model;
      report.repetitions["mitigated"].push_back(em_cut_fidelity_estimate(records, plan, *f_hat, group, sampled, correction).value);
      if (!model.xi.empty())
        report.repetitions["readout_mitigated"].push_back(em_readout_estimate(records, plan, table, model, group, sampled).value);
      report.repetitions["f_hat"].push_back(*f_hat);
    }
  }
  EstimationBudget budget = config.budget;
  budget.N = 1;
  aggregate_all(report, budget);
  for (const auto& [name, values] : report.repetitions) add_repetition_series(report, name, values, {});
}

void run_tomography(const ExperimentConfig& config, RunReport& report) {
  const CutCircuit cc = ghz_chain(config.chain());
  const QuantumState target = uncut_state(cc.plan, cc.circuits);
  const CutConfigTable table = cut_config_table();
  const auto configs = enumerate_global_configs(cc.plan, table);
  std::vector<PauliString> paulis;
  const std::uint64_t count = std::min<std::uint64_t>(64, dim_of(2 * config.n));
  for (std::uint64_t i = 0; i < count; ++i) paulis.push_back(quaternary_pauli(i, config.n));
  ExperimentConfig single = config;
  single.budget.L = 0;
  for (int r = 0; r < config.repetitions; ++r) {
    const std::uint64_t seed = repetition_seed(config.seed, r);
    const GhzRepetition rep = ghz_repetition(single, seed, ensemble_seed_for(config, seed), config.distributed);
    const UnitaryEnsemble ensemble = SchemeSpec{cc.plan.output_sizes(), config.budget.N, ensemble_seed_for(config, seed), config.ensemble}.build().ensemble;
    for (const auto& [platform, records] : {std::pair<std::string, const RecordSet*>{"p", &rep.records_p}, {"q", &rep.records_q}}) {
      const TomographyResult t = pauli_tomography(*records, cc.plan, table, ensemble, configs, paulis, target);
      report.repetitions["mse_" + platform].push_back(t.mse);
      report.repetitions["estimated_" + platform].push_back(t.estimated);
      if (r == 0 && platform == "p") {
        for (std::size_t i = 0; i < paulis.size(); ++i) {
          report.series.push_back({static_cast<double>(i), t.exact[i], 0.0, "pauli_exact"});
          if (t.estimates[i]) report.series.push_back({static_cast<double>(i), *t.estimates[i], 0.0, "pauli_estimate"});
        }
      }
    }
  }
  aggregate_all(report, config.budget);
  report.metrics["paulis"] = paulis.size();
}

QuantumState ghz_state(int n) {
  Circuit c(n);
  c.h(0);
  for (int q = 0; q + 1 < n; ++q) c.cnot(q, q + 1);
  return run_circuit(c, QuantumState::zero(n));
}

void run_variance_sweep(const ExperimentConfig& config, RunReport& report) {
  const auto& cliffords = single_qubit_clifford_table();
  nlohmann::json cells = nlohmann::json::array();
  for (std::uint64_t m : config.m_values) {
    for (int n : config.n_values) {
      const QuantumState state = n >= 2 ? ghz_state(n) : QuantumState::zero(n);
      Rng rng(config.seed, StreamKey{0, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m), 0,
                                     StreamPurpose::kRepetition, 1});
      std::vector<double> values;
      std::vector<Mat2> setting(static_cast<std::size_t>(n));
      for (int s = 0; s < config.samples; ++s) {
        for (auto& u : setting) u = cliffords[rng.below(cliffords.size())];
        const auto probs = measurement_probabilities(apply_local(state, setting));
        const auto cp = sample_shots(probs, m, rng), cq = sample_shots(probs, m, rng);
        std::vector<double> p(cp.size()), q(cq.size());
        for (std::size_t i = 0; i < cp.size(); ++i) {
          p[i] = static_cast<double>(cp[i]) / static_cast<double>(m);
          q[i] = static_cast<double>(cq[i]) / static_cast<double>(m);
        }
        values.push_back(std::ldexp(distance_pair_sum(p, q, n), n));
      }
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size() - 1);
      const double bound = 10.0 * (std::pow(1.2, n) + std::pow(3.0, n) / (static_cast<double>(m) * static_cast<double>(m)));
      const double var_err = var * std::sqrt(2.0 / static_cast<double>(values.size() - 1));
      const std::string tag = "m=" + std::to_string(m);
      report.series.push_back({static_cast<double>(n), var, var_err, "variance_" + tag});
      report.series.push_back({static_cast<double>(n), bound, 0.0, "bound_" + tag});
      cells.push_back({{"n", n}, {"m", m}, {"mean", mean}, {"variance", var}, {"bound", bound}});
      report.checks.push_back({"variance_envelope n=" + std::to_string(n) + " " + tag, var <= bound,
                               "variance " + std::to_string(var) + " vs bound " + std::to_string(bound)});
    }
  }
  report.metrics["cells"] = cells;
}

void run_calibrate(const ExperimentConfig& config, RunReport& report) {
  const CutCircuit cc = ghz_chain(config.chain());
  ReadoutNoiseModel model = config.readout_model();
  if (model.xi.empty()) model = ReadoutNoiseModel::uniform(config.n, 0.0, 0.0);
  const int qubit = cut_qubit(cc.plan);
  const CalibrationReport exact = calibrate_f_exact(model, qubit);
  const double xi = model.xi[static_cast<std::size_t>(qubit)], eta = model.eta[static_cast<std::size_t>(qubit)];
  report.metrics["f_exact"] = exact.f_hat;
  report.metrics["f_expected"] = (1.0 - xi - eta) / 3.0;
  report.metrics["qubit"] = qubit;
  std::vector<double> errors;
  for (int r = 0; r < config.repetitions && config.calibration_rounds > 0; ++r) {
    Rng rng(repetition_seed(config.seed, r), StreamKey{0, 0, 0, 0, StreamPurpose::kCalibration, 0});
    const CalibrationReport c = calibrate_f(model, qubit, config.calibration_rounds, rng);
    report.repetitions["f_hat"].push_back(c.f_hat);
    errors.push_back(c.std_error());
  }
  EstimationBudget budget = config.budget;
  budget.T = config.calibration_rounds;
  aggregate_all(report, budget);
  add_repetition_series(report, "f_hat", report.repetitions["f_hat"], errors);
}

void run_phase_learning(const ExperimentConfig& config, RunReport& report) {
  IsingSpec base;
  base.n = config.n;
  VqeOptions vqe;
  vqe.ansatz.part_sizes = config.chain();
  vqe.ansatz.layers = config.vqe_layers;
  vqe.restarts = config.vqe_restarts;
  vqe.seed = config.seed;
  const PhaseDataset data = build_phase_dataset(phase_h_grid(), base, &vqe);
  double min_fidelity = 1.0;
  for (const auto& v : data.vqe) min_fidelity = std::min(min_fidelity, v.fidelity);
  for (std::size_t i = 0; i < data.size(); ++i) {
    report.series.push_back({data.h[i], data.y[i], 0.0, "label"});
    report.series.push_back({data.h[i], data.vqe[i].energy, 0.0, "vqe_energy"});
    report.series.push_back({data.h[i], data.vqe[i].exact_energy, 0.0, "exact_energy"});
  }
  report.metrics["vqe_min_fidelity"] = min_fidelity;

  const KernelMatrix exact = exact_kernel(data.ground_states);
  std::vector<PartCircuits> circuits;
  for (std::size_t i = 0; i < data.size(); ++i) circuits.push_back(data.circuits(i));
  const CutPlan plan = vqe.ansatz.plan();

  auto federated = [&](std::uint64_t shots) {
    FederatedKernelOptions options;
    options.shots = shots;
    options.master_seed = config.seed;
    options.distributed = config.distributed;
    return federated_kernel(plan, circuits, options);
  };
  const FederatedKernelResult fed = federated(config.budget.m);
  const double cka = centered_kernel_alignment(fed.kernel.values, exact.values);
  report.metrics["cka"] = cka;
  report.metrics["kernel_mean_abs_error"] = (fed.kernel.values - exact.values).cwiseAbs().mean();
  report.metrics["kernel_max_abs_error"] = (fed.kernel.values - exact.values).cwiseAbs().maxCoeff();
  if (config.distributed) {
    report.metrics["sessions"] = fed.sessions;
    report.metrics["transcript_lines"] = fed.transcript_lines;
    report.metrics["transcript_violations"] = fed.transcript_violations;
  }

  const LearningReport on_exact = evaluate_learning(exact.values, data.y, config.train_size, config.splits, config.seed, config.svr);
  const LearningReport on_fed = evaluate_learning(fed.kernel.values, data.y, config.train_size, config.splits, config.seed, config.svr);
  report.metrics["mse_exact_kernel"] = {{"mean", on_exact.mean_mse}, {"sum", on_exact.mean_mse_sum}, {"heldout", on_exact.mean_heldout_mse}};
  report.metrics["mse_federated_kernel"] = {{"mean", on_fed.mean_mse}, {"sum", on_fed.mean_mse_sum}, {"heldout", on_fed.mean_heldout_mse}};
  for (const auto& s : on_exact.splits) report.repetitions["mse_exact_kernel"].push_back(s.mse.mean);
  for (const auto& s : on_fed.splits) report.repetitions["mse_federated_kernel"].push_back(s.mse.mean);

  // Kernel ridge on the first split as a cross-model reference.
  {
    const auto& train = on_exact.splits.front().train;
    const auto l = static_cast<Eigen::Index>(train.size()), total = static_cast<Eigen::Index>(data.size());
    RMatrix k_train(l, l), k_cross(l, total);
    std::vector<double> y_train;
    for (Eigen::Index a = 0; a < l; ++a) {
      y_train.push_back(data.y[static_cast<std::size_t>(train[static_cast<std::size_t>(a)])]);
      for (Eigen::Index b = 0; b < l; ++b) k_train(a, b) = exact.values(train[static_cast<std::size_t>(a)], train[static_cast<std::size_t>(b)]);
      for (Eigen::Index t = 0; t < total; ++t) k_cross(a, t) = exact.values(train[static_cast<std::size_t>(a)], t);
    }
    const auto ridge = kernel_ridge_predict(k_train, y_train, k_cross);
    report.metrics["ridge_mse_split0"] = mean_squared_error(ridge, data.y).mean;
    report.metrics["svr_mse_split0"] = on_exact.splits.front().mse.mean;
    for (std::size_t i = 0; i < data.size(); ++i) {
      report.series.push_back({data.h[i], on_exact.splits.front().predictions[i], 0.0, "svr_prediction_exact_kernel"});
      report.series.push_back({data.h[i], on_fed.splits.front().predictions[i], 0.0, "svr_prediction_federated_kernel"});
    }
  }

  for (int size : config.train_sizes) {
    const auto le = evaluate_learning(exact.values, data.y, size, config.splits, config.seed, config.svr);
    const auto lf = evaluate_learning(fed.kernel.values, data.y, size, config.splits, config.seed, config.svr);
    report.series.push_back({static_cast<double>(size), le.mean_mse, 0.0, "mse_vs_training_size_exact"});
    report.series.push_back({static_cast<double>(size), lf.mean_mse, 0.0, "mse_vs_training_size_federated"});
  }
  for (std::uint64_t shots : config.shots_values) {
    const FederatedKernelResult k = federated(shots);
    const auto lf = evaluate_learning(k.kernel.values, data.y, config.train_size, config.splits, config.seed, config.svr);
    report.series.push_back({static_cast<double>(shots), lf.mean_mse, 0.0, "mse_vs_shots"});
    report.series.push_back({static_cast<double>(shots), centered_kernel_alignment(k.kernel.values, exact.values), 0.0, "cka_vs_shots"});
  }
  aggregate_all(report, config.budget);
}

void run_oracle_suite(RunReport& report) {
  auto check = [&](const std::string& name, bool passed, const std::string& detail) {
    report.checks.push_back({name, passed, detail});
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  for (int k : {1, 2}) {
    const double dev = identity_reconstruction_check(k);
    check("identity_reconstruction k1=" + std::to_string(k), dev < 1e-12, "max deviation " + num(dev));
    const double schur = schur_average_check(k);
    const double tol = k == 1 ? 1e-12 : 1e-10;
    check("schur_average k=" + std::to_string(k), schur < tol, "max deviation " + num(schur));
  }
  const PermutationSumReport perm = permutation_sum_check();
  check("permutation_sum", perm.total == 36.0, "total " + num(perm.total));
  check("permutation_cells", perm.cell(0, 0, 0, 0).y2 == 24 && perm.cell(0, 0, 0, 1).y2 == 6 && perm.cell(0, 1, 0, 1).y2 == 4,
        "cells 24/6/4");
  for (const auto& [t, d] : {std::pair{2, 2}, std::pair{4, 2}}) {
    const WeingartenReport w = weingarten_sum_check(t, d);
    check("weingarten t=" + std::to_string(t) + " d=" + std::to_string(d), w.max_deviation < 1e-10,
          "expected " + num(w.expected) + ", max deviation " + num(w.max_deviation));
  }
  const std::vector<std::pair<std::vector<int>, std::size_t>> counts{{{2, 2}, 12}, {{2, 2, 2}, 44}, {{2, 2, 2, 2}, 76}};
  for (const auto& [sizes, expected] : counts) {
    const auto got = enumerate_configurations(chain_plan(sizes)).size();
    check("configuration_count r=" + std::to_string(sizes.size()), got == expected, "count " + std::to_string(got));
  }
  const CutCircuit ghz = ghz_cut_plan(5);
  PartCircuits zero;
  for (int j = 0; j < ghz.plan.num_parts(); ++j) zero.emplace_back(static_cast<int>(ghz.plan.part(j).global_qubits.size()));
  const double self = exact_estimator_expectation(ghz.plan, ghz.circuits, ghz.circuits, OracleEstimator::kDistance);
  const double cross = exact_estimator_expectation(ghz.plan, ghz.circuits, zero, OracleEstimator::kDistance);
  check("exact_expectation ghz5/ghz5", std::abs(self - 1.0) < 1e-9, "value " + num(self));
  check("exact_expectation ghz5/zero", std::abs(cross - 0.5) < 1e-9, "value " + num(cross));
  for (const auto& c : report.checks) report.metrics[c.name] = c.passed;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = config;
  try {
    switch (config.experiment) {
      case ExperimentKind::kGhzFidelity:
        run_ghz_fidelity(config, report);
        break;
      case ExperimentKind::kGhzPureFidelity:
        run_ghz_pure_fidelity(config, report);
        break;
      case ExperimentKind::kTomography:
        run_tomography(config, report);
        break;
      case ExperimentKind::kVarianceSweep:
        run_variance_sweep(config, report);
        break;
      case ExperimentKind::kCalibrate:
        run_calibrate(config, report);
        break;
      case ExperimentKind::kPhaseLearning:
        run_phase_learning(config, report);
        break;
      case ExperimentKind::kOracleSuite:
        run_oracle_suite(report);
        break;
    }
  } catch (const TransportError& e) {
    report.error = std::string("transport: ") + e.what();
  } catch (const ProtocolError& e) {
    report.error = std::string("protocol: ") + e.what();
  } catch (const EstimationError& e) {
    report.error = std::string("estimation: ") + e.what();
  }
  if (report.error) aggregate_all(report, config.budget);
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace xplat
