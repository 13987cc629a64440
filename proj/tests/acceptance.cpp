// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "xplat/experiments.hpp"
#include "xplat/mitigation.hpp"
#include "xplat/oracles.hpp"
#include "xplat/platform.hpp"
#include "xplat/protocol.hpp"

using namespace xplat;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.passed = false;
    out.detail << "exception: " << e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.passed) ++failures;
  std::printf("%s %s (%.1fs) %s\n", out.passed ? "PASS" : "FAIL", name.c_str(), seconds, out.detail.str().c_str());
  std::fflush(stdout);
}

PartCircuits blank_circuits(const CutPlan& plan) {
  PartCircuits out;
  for (int j = 0; j < plan.num_parts(); ++j) out.emplace_back(static_cast<int>(plan.part(j).global_qubits.size()));
  return out;
}

RecordSet exact_records(const CutPlan& plan, const PartCircuits& circuits, std::uint32_t platform,
                        const MeasurementScheme& scheme, const std::vector<GlobalConfig>& configs) {
  const auto jobs = plan_jobs(required_settings(plan, configs), scheme, 0);
  return collect_records(PlatformProgram{plan, circuits, {}, {}}, scheme, platform, jobs, 0);
}

const std::vector<SeriesPoint> series_named(const RunReport& report, const std::string& name) {
  std::vector<SeriesPoint> out;
  for (const auto& p : report.series)
    if (p.series == name) out.push_back(p);
  return out;
}

ExperimentConfig ghz_config(int n, int settings, std::uint64_t shots, const std::string& ensemble) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::kGhzFidelity;
  c.n = n;
  c.budget = EstimationBudget{settings, shots, 0, 0};
  c.ensemble = ensemble;
  c.repetitions = 12;
  return c;
}

}  // namespace

int main() {
  criterion("identity-reconstruction", [](Outcome& o) {
    for (int k = 1; k <= 2; ++k) {
      const double dev = identity_reconstruction_check(k);
      o.detail << "k=" << k << " dev=" << dev << " ";
      o.require(dev < 1e-12, "k=" + std::to_string(k));
    }
  });

  criterion("schur-average", [](Outcome& o) {
    const double d1 = schur_average_check(1), d2 = schur_average_check(2);
    o.detail << "k=1 dev=" << d1 << " k=2 dev=" << d2;
    o.require(d1 < 1e-12, "k=1");
    o.require(d2 < 1e-10, "k=2");
  });

  criterion("permutation-sum", [](Outcome& o) {
    const PermutationSumReport r = permutation_sum_check();
    o.detail << "total=" << r.total << " cells=" << r.cell(0, 0, 0, 0).y2 << "," << r.cell(0, 0, 0, 1).y2 << ","
             << r.cell(0, 1, 0, 1).y2;
    o.require(r.total == 36.0, "total");
    o.require(r.cell(0, 0, 0, 0).y2 == 24, "cell 0000");
    o.require(r.cell(0, 0, 0, 1).y2 == 6, "cell 0001");
    o.require(r.cell(0, 1, 0, 1).y2 == 4, "cell 0101");
  });

  criterion("weingarten-sums", [](Outcome& o) {
    for (const auto& [t, expected] : {std::pair{2, 1.0 / 6.0}, std::pair{4, 1.0 / 120.0}}) {
      const WeingartenReport w = weingarten_sum_check(t, 2);
      o.detail << "t=" << t << " dev=" << w.max_deviation << " ";
      o.require(std::abs(w.expected - expected) < 1e-15 && w.max_deviation < 1e-10, "t=" + std::to_string(t));
    }
  });

  criterion("exact-mode-unbiasedness", [](Outcome& o) {
    Rng rng(2024);
    const CutConfigTable table = cut_config_table();
    double worst = 0.0;
    int cases = 0;
    const auto check_pair = [&](const CutPlan& plan, const PartCircuits& a, const PartCircuits& b) {
      const double reference = overlap_trace(uncut_state(plan, a), uncut_state(plan, b));
      const double oracle = exact_estimator_expectation(plan, a, b, OracleEstimator::kDistance);
      const UnitaryEnsemble ens = shared_ensemble(plan.output_sizes(), 1, 0, EnsembleMode::kExhaustive);
      const MeasurementScheme scheme = MeasurementScheme::local(ens);
      const auto configs = enumerate_global_configs(plan, table);
      const RecordSet p = exact_records(plan, a, 1, scheme, configs), q = exact_records(plan, b, 2, scheme, configs);
      std::vector<double> values{oracle, multi_cut_estimate(p, q, plan, table, ens, configs, configs).value,
                                 em_cut_estimate(p, q, plan, ens, 1.0 / 3.0, 1.0 / 3.0).value};
      if (plan.num_cuts() == 1) values.push_back(parallel_single_cut_estimate(p, q, plan, table, ens).value);
      Rng split(1);
      const double purity = purity_estimate(p, plan, table, ens, configs, split).value;
      worst = std::max(worst, std::abs(purity - overlap_trace(uncut_state(plan, a), uncut_state(plan, a))));
      for (double v : values) worst = std::max(worst, std::abs(v - reference));
      ++cases;
    };
    for (const auto& sizes : std::vector<std::vector<int>>{{2, 2}, {2, 3}, {3, 3}}) {
      const CutPlan plan = chain_plan(sizes);
      for (int pair = 0; pair < 20; ++pair) check_pair(plan, random_part_circuits(plan, 3, rng), random_part_circuits(plan, 3, rng));
    }
    const CutPlan two_cuts = chain_plan({2, 2, 3});
    for (int pair = 0; pair < 5; ++pair)
      check_pair(two_cuts, random_part_circuits(two_cuts, 3, rng), random_part_circuits(two_cuts, 3, rng));
    check_pair(two_cuts, ghz_chain({2, 2, 3}).circuits, blank_circuits(two_cuts));

    const CutPlan uncut = chain_plan({3});
    for (int pair = 0; pair < 5; ++pair) {
      const auto a = random_part_circuits(uncut, 3, rng), b = random_part_circuits(uncut, 3, rng);
      const double reference = overlap_trace(uncut_state(uncut, a), uncut_state(uncut, b));
      worst = std::max(worst, std::abs(exact_estimator_expectation(uncut, a, b, OracleEstimator::kCollision) - reference));
      const UnitaryEnsemble ens = shared_ensemble({3}, 1, 0, EnsembleMode::kExhaustive);
      const auto configs = enumerate_global_configs(uncut, table);
      const MeasurementScheme scheme = MeasurementScheme::local(ens);
      const double d = distance_cp_estimate(exact_records(uncut, a, 1, scheme, configs),
                                            exact_records(uncut, b, 2, scheme, configs), ens, 3).value;
      worst = std::max(worst, std::abs(d - reference));
      ++cases;
    }
    o.detail << cases << " cases, max |estimate - tr(rho sigma)| = " << worst;
    o.require(worst < 1e-9, "tolerance 1e-9");
  });

  criterion("ghz5-fidelity", [](Outcome& o) {
    const RunReport r = run_experiment(ghz_config(5, 9, 500, "exhaustive"));
    o.require(!r.error, r.error.value_or(""));
    const EstimateReport& f = r.aggregates.at("fidelity");
    o.detail << "F=" << f.value << " se=" << f.std_error;
    o.require(std::abs(f.value - 1.0) <= 0.1, "within 0.1");
    o.require(std::abs(f.value - 1.0) <= 3.0 * f.std_error, "within 3 se");
  });

  criterion("ghz-scaling", [](Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::vector<SeriesPoint>> curves;
    const std::vector<ExperimentConfig> configs{ghz_config(5, 9, 500, "exhaustive"), ghz_config(7, 40, 1000, "random"),
                                                ghz_config(9, 50, 1000, "random"), ghz_config(11, 66, 1000, "random")};
    for (const auto& c : configs) {
      const RunReport r = run_experiment(c);
      o.require(!r.error, r.error.value_or(""));
      const EstimateReport& f = r.aggregates.at("fidelity");
      o.detail << "n=" << c.n << " F=" << f.value << "+-" << f.std_error << " ";
      o.require(std::abs(f.value - 1.0) <= 3.0 * f.std_error, "n=" + std::to_string(c.n) + " within 3 sigma");
      curves.push_back(series_named(r, "overlap_error_vs_repetitions"));
    }
    const double slope = pooled_error_slope(curves);
    const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
    o.detail << "slope=" << slope << " minutes=" << minutes;
    o.require(std::abs(slope + 0.5) <= 0.15, "slope");
    o.require(minutes < 30.0, "runtime");
  });

  criterion("variance-envelope", [](Outcome& o) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::kVarianceSweep;
    const RunReport r = run_experiment(c);
    for (const auto& check : r.checks) {
      o.detail << check.name << ": " << check.detail << "; ";
      o.require(check.passed, check.name);
    }
    o.require(r.checks.size() == 6, "six cells");
  });

  criterion("readout-mitigation", [](Outcome& o) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::kGhzPureFidelity;
    c.budget = EstimationBudget{1, 0, 0, 0};
    c.readout_error = 0.05;
    c.mitigation = true;
    c.calibration_rounds = 0;
    c.repetitions = 1;
    const RunReport r = run_experiment(c);
    const double raw = r.aggregates.at("raw").value, mitigated = r.aggregates.at("mitigated").value;
    o.detail << "raw=" << raw << " mitigated=" << mitigated << " ";
    o.require(std::abs(mitigated - 1.0) <= 0.02, "mitigated within 0.02");
    o.require(std::abs(raw - 1.0) >= 0.03, "unmitigated deviates");

    ExperimentConfig cal;
    cal.experiment = ExperimentKind::kCalibrate;
    cal.readout_error = 0.05;
    cal.calibration_rounds = 10000;
    cal.repetitions = 1;
    const RunReport rc = run_experiment(cal);
    const double f = rc.repetitions.at("f_hat").front();
    o.detail << "f_hat=" << f;
    o.require(std::abs(f - 0.3) <= 0.005, "calibration");
  });

  criterion("configuration-counts", [](Outcome& o) {
    const std::size_t a = enumerate_configurations(chain_plan({2, 2})).size();
    const std::size_t b = enumerate_configurations(chain_plan({2, 2, 2})).size();
    const std::size_t c = enumerate_configurations(chain_plan({2, 2, 2, 2})).size();
    o.detail << a << "," << b << "," << c;
    o.require(a == 12 && b == 44 && c == 76, "counts");
  });

  RunReport phase;
  criterion("phase-learning", [&phase](Outcome& o) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::kPhaseLearning;
    c.budget = EstimationBudget{1, 1000, 0, 0};
    c.distributed = true;
    phase = run_experiment(c);
    o.require(!phase.error, phase.error.value_or(""));
    const double cka = phase.metrics.at("cka");
    const double mse_exact = phase.metrics.at("mse_exact_kernel").at("mean");
    const double mse_fed = phase.metrics.at("mse_federated_kernel").at("mean");
    o.detail << "cka=" << cka << " mse_exact=" << mse_exact << " mse_federated=" << mse_fed;
    o.require(cka >= 0.95, "cka");
    o.require(mse_exact <= 0.05, "mse exact kernel");
    o.require(mse_fed <= 0.05, "mse federated kernel");
  });

  criterion("distributed-equivalence", [&phase](Outcome& o) {
    ExperimentConfig c = ghz_config(5, 9, 500, "exhaustive");
    c.seed = 42;
    std::vector<std::string> transcript;
    const EstimateReport d = run_distributed_estimate(c, &transcript);
    const EstimateReport l = run_inprocess_estimate(c);
    o.detail.precision(17);
    o.detail << "distributed=" << d.value << " in-process=" << l.value << " ";
    o.require(d.value == l.value && d.std_error == l.std_error, "bit-identical");
    o.require(transcript_violations(transcript) == 0, "ghz transcript");
    const std::size_t lines = phase.metrics.value("transcript_lines", std::size_t{0});
    const std::size_t violations = phase.metrics.value("transcript_violations", std::size_t{1});
    o.detail << "phase-learning lines=" << lines << " violations=" << violations;
    o.require(lines > 0 && violations == 0, "phase-learning transcript");
  });

  criterion("collision-and-distance", [](Outcome& o) {
    const CutPlan plan = chain_plan({3});
    const auto configs = enumerate_global_configs(plan, cut_config_table());
    const auto settings = required_settings(plan, configs);
    Rng rng(77);
    for (int pair = 0; pair < 3; ++pair) {
      const auto a = random_part_circuits(plan, 3, rng), b = random_part_circuits(plan, 3, rng);
      const double reference = overlap_trace(uncut_state(plan, a), uncut_state(plan, b));
      const std::uint64_t seed = 100 + static_cast<std::uint64_t>(pair);

      const UnitaryEnsemble ens = shared_ensemble({3}, 200, seed);
      const MeasurementScheme local = MeasurementScheme::local(ens);
      const auto local_jobs = plan_jobs(settings, local, 100);
      const EstimateReport d = distance_cp_estimate(collect_records({plan, a, {}, {}}, local, 1, local_jobs, seed),
                                                    collect_records({plan, b, {}, {}}, local, 2, local_jobs, seed), ens, 3);

      const MeasurementScheme global = MeasurementScheme::global(global_ensemble(3, 200, GlobalEnsembleKind::kMub, seed));
      const auto global_jobs = plan_jobs(settings, global, 100);
      const EstimateReport c = collision_cp_estimate(collect_records({plan, a, {}, {}}, global, 1, global_jobs, seed),
                                                     collect_records({plan, b, {}, {}}, global, 2, global_jobs, seed), 200, 3);
      o.detail << "ref=" << reference << " dist=" << d.value << "+-" << d.std_error << " coll=" << c.value << "+-"
               << c.std_error << "; ";
      o.require(std::abs(d.value - reference) <= 3.0 * d.std_error, "distance pair " + std::to_string(pair));
      o.require(std::abs(c.value - reference) <= 3.0 * c.std_error, "collision pair " + std::to_string(pair));
    }
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
