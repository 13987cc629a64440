#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "helpers.hpp"
#include "xplat/mitigation.hpp"
#include "xplat/oracles.hpp"

using namespace xplat;

TEST_SUITE("noise-mitigation") {

TEST_CASE("readout noise on exact distributions") {
  const ReadoutNoiseModel model = ReadoutNoiseModel::uniform(2, 0.1, 0.2);
  const std::vector<int> qubits{0, 1};
  const std::vector<double> zero{1.0, 0.0, 0.0, 0.0};
  const auto noisy = apply_readout_noise(zero, model, qubits);
  CHECK(noisy[0] == doctest::Approx(0.81));
  CHECK(noisy[1] == doctest::Approx(0.09));
  CHECK(noisy[2] == doctest::Approx(0.09));
  CHECK(noisy[3] == doctest::Approx(0.01));
  const std::vector<double> one{0.0, 0.0, 0.0, 1.0};
  CHECK(apply_readout_noise(one, model, qubits)[0] == doctest::Approx(0.04));
  CHECK(std::accumulate(noisy.begin(), noisy.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<int> wrong{0, 5};
  CHECK_THROWS_AS(apply_readout_noise(zero, model, wrong), DimensionError);
  CHECK(ReadoutNoiseModel::uniform(3, 0.0, 0.0).is_noiseless());
  CHECK_FALSE(model.is_noiseless());
  CHECK_THROWS_AS((ReadoutNoiseModel{{0.1}, {1.0}}.validate()), InvalidArgument);
}

TEST_CASE("sampled readout noise preserves the shot total") {
  const ReadoutNoiseModel model = ReadoutNoiseModel::uniform(1, 0.25, 0.0);
  const std::vector<int> qubits{0};
  const std::vector<std::uint64_t> counts{10000, 0};
  Rng rng(4);
  const auto flipped = apply_readout_noise(counts, model, qubits, rng);
  CHECK(flipped[0] + flipped[1] == 10000);
  CHECK(std::abs(static_cast<double>(flipped[1]) - 2500.0) < 4.0 * std::sqrt(10000 * 0.25 * 0.75));
}

TEST_CASE("readout inverse undoes the confusion") {
  const ReadoutNoiseModel model = ReadoutNoiseModel::uniform(2, 0.05, 0.1);
  const auto inv = readout_inverse(model);
  REQUIRE(inv.size() == 2);
  CHECK((inv[0] * model.confusion(0) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  Rng rng(6);
  std::vector<double> p(4);
  for (auto& v : p) v = rng.uniform();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  const std::vector<int> qubits{0, 1};
  const auto noisy = apply_readout_noise(p, model, qubits);
  const Eigen::Matrix2d* mats[2] = {&inv[0], &inv[1]};
  const auto back = apply_bitwise(noisy, mats);
  for (int i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(p[i]).epsilon(1e-12));

  CHECK_THROWS_AS(readout_inverse(ReadoutNoiseModel::uniform(1, 0.5, 0.5)), InvalidArgument);
}

TEST_CASE("exact calibration") {
  CHECK(calibrate_f_exact(0.0, 0.0).f_hat == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(calibrate_f_exact(0.05, 0.05).f_hat == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(calibrate_f_exact(0.1, 0.0).f_hat == doctest::Approx(0.3).epsilon(1e-14));
  const ReadoutNoiseModel model{{0.0, 0.05}, {0.0, 0.05}};
  CHECK(calibrate_f_exact(model, 1).f_hat == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(calibrate_f_exact(model, 0).f_hat == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(calibrate_f_exact(1.0, 0.0), InvalidArgument);
}

TEST_CASE("sampled calibration") {
  Rng one(1);
  const CalibrationReport single = calibrate_f(0.0, 0.0, 1, one);
  CHECK(single.rounds == 1);
  const double magnitude = std::abs(single.f_hat);
  CHECK((magnitude < 1e-12 || std::abs(magnitude - 1.0) < 1e-12));

  Rng rng(2);
  const CalibrationReport full = calibrate_f(0.0, 0.0, 24, rng);
  CHECK(full.f_hat == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  for (int rounds : {100, 1000, 10000}) {
    CAPTURE(rounds);
    Rng r(static_cast<std::uint64_t>(rounds));
    const CalibrationReport c = calibrate_f(0.05, 0.05, rounds, r);
    CHECK(c.values.size() == static_cast<std::size_t>(rounds));
    CHECK(std::abs(c.f_hat - 0.3) < 3.0 * c.std_error() + 1e-12);
  }
  Rng big(9);
  CHECK(std::abs(calibrate_f(0.05, 0.05, 10000, big).f_hat - 0.3) < 0.005);
  CHECK_THROWS_AS(calibrate_f(0.05, 0.05, 0, rng), InvalidArgument);
}

TEST_CASE("calibrated cut estimator") {
  const CutCircuit g = ghz_cut_plan(5);
  const CutConfigTable table = cut_config_table();
  const UnitaryEnsemble ens = test::exhaustive(g.plan);
  const auto configs = enumerate_global_configs(g.plan, table);
  const auto p = test::exact_records(g.plan, g.circuits, 1, ens, configs);
  const auto q = test::exact_records(g.plan, g.circuits, 2, ens, configs);
  const double plain = multi_cut_estimate(p, q, g.plan, table, ens, configs, configs).value;
  const double third = em_cut_estimate(p, q, g.plan, ens, 1.0 / 3.0, 1.0 / 3.0).value;
  CHECK(std::abs(plain - third) < 1e-12);

  // Readout noise on the shared qubit: the cut bit of part 0 and an output bit of part 1.
  const ReadoutNoiseModel cut_noise{{0, 0, 0.05, 0, 0}, {0, 0, 0.05, 0, 0}};
  const CutConfigTable noisy_table = cut_config_table(1, 0.3);
  const auto noisy_configs = enumerate_global_configs(g.plan, noisy_table);
  const auto np = test::exact_records(g.plan, g.circuits, 1, ens, noisy_configs, cut_noise);
  const auto nq = test::exact_records(g.plan, g.circuits, 2, ens, noisy_configs, cut_noise);
  const double raw = multi_cut_estimate(np, nq, g.plan, table, ens, configs, configs).value;
  const ReadoutCorrection correction{&cut_noise, &cut_noise};
  const double mitigated = em_cut_estimate(np, nq, g.plan, ens, 0.3, 0.3, correction).value;
  CHECK(mitigated == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(raw - 1.0) > 0.03);
}

TEST_CASE("readout mitigation of stabilizer fidelity") {
  const CutCircuit g = ghz_cut_plan(5);
  const CutConfigTable table = cut_config_table();
  const auto configs = enumerate_global_configs(g.plan, table);
  const StabilizerGroup group = ghz_stabilizers(5);
  const MeasurementScheme scheme = MeasurementScheme::stabilizer(group);
  const auto jobs = plan_jobs(required_settings(g.plan, configs), scheme, 0);
  const ReadoutNoiseModel model = ReadoutNoiseModel::uniform(5, 0.05, 0.05);
  const auto records = collect_records(PlatformProgram{g.plan, g.circuits, model, {}}, scheme, 1, jobs, 0);
  std::vector<int> all(32);
  std::iota(all.begin(), all.end(), 0);

  const double raw = pure_state_fidelity_estimate(records, g.plan, table, group, all, configs).value;
  const double readout_only = em_readout_estimate(records, g.plan, table, model, group, all).value;
  const double full = em_cut_fidelity_estimate(records, g.plan, calibrate_f_exact(model, 2).f_hat, group, all, &model).value;
  CHECK(raw < readout_only);
  CHECK(readout_only < 1.0);
  CHECK(full == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(raw < 0.9);

  // A supplied readout model off by 0.01 in xi leaves a small bias; f is calibrated on the device.
  const double f_hat = calibrate_f_exact(model, 2).f_hat;
  for (double delta : {-0.01, 0.01}) {
    const ReadoutNoiseModel off = ReadoutNoiseModel::uniform(5, 0.05 + delta, 0.05);
    const double f = em_cut_fidelity_estimate(records, g.plan, f_hat, group, all, &off).value;
    CAPTURE(f);
    CHECK(std::abs(f - 1.0) < 0.05);
  }

  const OutcomeTable t = make_exact_table(1, {0.95, 0.05});
  const std::vector<int> q0{0};
  CHECK(em_readout_parity(t, ReadoutNoiseModel::uniform(1, 0.05, 0.05), q0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(em_readout_parity(t, ReadoutNoiseModel::uniform(1, 0.0, 0.0), q0, 1) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("noise model files") {
  const auto dir = std::filesystem::temp_directory_path() / "xplat_noise_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.csv").string();
  const ReadoutNoiseModel model{{0.01, 0.02, 0.03}, {0.04, 0.05, 0.06}};
  save_noise_model(model, path);
  const ReadoutNoiseModel back = load_noise_model(path);
  CHECK(back.xi == model.xi);
  CHECK(back.eta == model.eta);
  CHECK_THROWS_AS(load_noise_model((dir / "missing.csv").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
