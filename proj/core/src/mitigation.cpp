#include "xplat/mitigation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "xplat/clifford.hpp"

namespace xplat {

// ---------------------------------------------------------------- readout model

ReadoutNoiseModel ReadoutNoiseModel::uniform(int n, double xi, double eta) {
  ReadoutNoiseModel m{std::vector<double>(static_cast<std::size_t>(n), xi),
                      std::vector<double>(static_cast<std::size_t>(n), eta)};
  m.validate();
  return m;
}

bool ReadoutNoiseModel::is_noiseless() const {
  return std::all_of(xi.begin(), xi.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(eta.begin(), eta.end(), [](double v) { return v == 0.0; });
}

void ReadoutNoiseModel::validate() const {
  if (xi.size() != eta.size()) throw InvalidArgument("readout model needs one (xi, eta) pair per qubit");
  for (std::size_t q = 0; q < xi.size(); ++q)
    if (!(xi[q] >= 0.0 && xi[q] < 1.0 && eta[q] >= 0.0 && eta[q] < 1.0))
      throw InvalidArgument("readout flip probabilities must lie in [0, 1)");
}

Eigen::Matrix2d ReadoutNoiseModel::confusion(int q) const {
  const double x = xi.at(static_cast<std::size_t>(q)), e = eta.at(static_cast<std::size_t>(q));
  Eigen::Matrix2d m;
  m << 1.0 - x, e, x, 1.0 - e;
  return m;
}

std::vector<Eigen::Matrix2d> readout_inverse(const ReadoutNoiseModel& model) {
  model.validate();
  std::vector<Eigen::Matrix2d> out;
  for (int q = 0; q < model.num_qubits(); ++q) {
    const double x = model.xi[static_cast<std::size_t>(q)], e = model.eta[static_cast<std::size_t>(q)];
    const double det = 1.0 - x - e;
    if (det <= 0.0) throw InvalidArgument("readout channel is singular on qubit " + std::to_string(q));
    Eigen::Matrix2d inv;
    inv << 1.0 - e, -e, -x, 1.0 - x;
    out.push_back(inv / det);
  }
  return out;
}

std::vector<double> apply_bitwise(std::span<const double> table, std::span<const Eigen::Matrix2d* const> mats) {
  const int bits = static_cast<int>(mats.size());
  if (table.size() != (std::size_t{1} << bits)) throw DimensionError("table size does not match the bit count");
  std::vector<double> y(table.begin(), table.end());
  for (int b = 0; b < bits; ++b) {
    const Eigen::Matrix2d* m = mats[static_cast<std::size_t>(b)];
    if (!m) continue;
    const std::size_t stride = std::size_t{1} << (bits - 1 - b);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (i & stride) continue;
      const double v0 = y[i], v1 = y[i | stride];
      y[i] = (*m)(0, 0) * v0 + (*m)(0, 1) * v1;
      y[i | stride] = (*m)(1, 0) * v0 + (*m)(1, 1) * v1;
    }
  }
  return y;
}

std::vector<double> apply_readout_noise(std::span<const double> probs, const ReadoutNoiseModel& model,
                                        std::span<const int> qubits) {
  model.validate();
  std::vector<Eigen::Matrix2d> conf;
  for (int q : qubits) {
    if (q < 0 || q >= model.num_qubits()) throw DimensionError("readout model has no entry for qubit " + std::to_string(q));
    conf.push_back(model.confusion(q));
  }
  std::vector<const Eigen::Matrix2d*> ptrs;
  for (const auto& m : conf) ptrs.push_back(&m);
  return apply_bitwise(probs, ptrs);
}

std::vector<std::uint64_t> apply_readout_noise(std::span<const std::uint64_t> counts, const ReadoutNoiseModel& model,
                                               std::span<const int> qubits, Rng& rng) {
  model.validate();
  const int bits = static_cast<int>(qubits.size());
  if (counts.size() != (std::size_t{1} << bits)) throw DimensionError("count table size does not match the bit count");
  for (int q : qubits)
    if (q < 0 || q >= model.num_qubits()) throw DimensionError("readout model has no entry for qubit " + std::to_string(q));
  std::vector<std::uint64_t> out(counts.size(), 0);
  for (std::size_t idx = 0; idx < counts.size(); ++idx) {
    for (std::uint64_t k = 0; k < counts[idx]; ++k) {
      std::size_t read = idx;
      for (int b = 0; b < bits; ++b) {
        const std::size_t bit = std::size_t{1} << (bits - 1 - b);
        const auto q = static_cast<std::size_t>(qubits[static_cast<std::size_t>(b)]);
        const double flip = (idx & bit) ? model.eta[q] : model.xi[q];
        if (rng.bernoulli(flip)) read ^= bit;
      }
      ++out[read];
    }
  }
  return out;
}

ReadoutNoiseModel load_noise_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise model " + path);
  std::vector<std::pair<int, std::pair<double, double>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("qubit", 0) == 0) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw ConfigError("noise model row " + std::to_string(line_no) + " needs qubit,xi,eta");
    try {
      rows.push_back({std::stoi(a), {std::stod(b), std::stod(c)}});
    } catch (const std::logic_error&) {
      throw ConfigError("malformed noise model row " + std::to_string(line_no));
    }
  }
  std::sort(rows.begin(), rows.end());
  ReadoutNoiseModel model;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<int>(i)) throw ConfigError("noise model qubits must be 0..n-1 without gaps");
    model.xi.push_back(rows[i].second.first);
    model.eta.push_back(rows[i].second.second);
  }
  try {
    model.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return model;
}

void save_noise_model(const ReadoutNoiseModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write noise model " + path);
  out.precision(17);
  out << "qubit,xi,eta\n";
  for (int q = 0; q < model.num_qubits(); ++q)
    out << q << ',' << model.xi[static_cast<std::size_t>(q)] << ',' << model.eta[static_cast<std::size_t>(q)] << '\n';
}

// ---------------------------------------------------------------- calibration

double CalibrationReport::std_error() const {
  if (values.size() < 2) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

nlohmann::json CalibrationReport::to_json() const { return {{"f_hat", f_hat}, {"rounds", rounds}}; }

namespace {

// |<0|C|0>|^2 for every table element.
std::vector<double> return_probabilities() {
  std::vector<double> out;
  for (const Mat2& c : single_qubit_clifford_table()) out.push_back(std::norm(c(0, 0)));
  return out;
}

void check_flips(double xi, double eta) {
  if (!(xi >= 0.0 && xi < 1.0 && eta >= 0.0 && eta < 1.0)) throw InvalidArgument("flip probabilities must lie in [0, 1)");
}

}  // namespace

CalibrationReport calibrate_f_exact(double xi, double eta) {
  check_flips(xi, eta);
  CalibrationReport r;
  for (double a : return_probabilities()) {
    const double p0 = a * (1.0 - xi) + (1.0 - a) * eta;
    const double p1 = 1.0 - p0;
    r.values.push_back(p0 * (2.0 * a - 1.0) + p1 * (2.0 * (1.0 - a) - 1.0));
  }
  r.rounds = static_cast<int>(r.values.size());
  r.f_hat = std::accumulate(r.values.begin(), r.values.end(), 0.0) / r.rounds;
  return r;
}

CalibrationReport calibrate_f(double xi, double eta, int rounds, Rng& rng) {
  check_flips(xi, eta);
  if (rounds < 1) throw InvalidArgument("calibration needs at least one round");
  const auto returns = return_probabilities();
  const int group = static_cast<int>(returns.size());
  std::vector<int> schedule;
  for (int k = 0; k < rounds / group; ++k)
    for (int c = 0; c < group; ++c) schedule.push_back(c);
  std::vector<int> rest(static_cast<std::size_t>(group));
  std::iota(rest.begin(), rest.end(), 0);
  for (int i = 0; i < rounds % group; ++i) {
    const auto pick = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(group - i));
    std::swap(rest[static_cast<std::size_t>(i)], rest[pick]);
    schedule.push_back(rest[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = schedule.size(); i > 1; --i) std::swap(schedule[i - 1], schedule[rng.below(i)]);

  CalibrationReport r;
  r.rounds = rounds;
  for (int c : schedule) {
    const double a = returns[static_cast<std::size_t>(c)];
    const int truth = rng.bernoulli(a) ? 0 : 1;
    const int read = rng.bernoulli(truth == 0 ? xi : eta) ? 1 - truth : truth;
    const double overlap = read == 0 ? a : 1.0 - a;
    r.values.push_back(2.0 * overlap - 1.0);
  }
  r.f_hat = std::accumulate(r.values.begin(), r.values.end(), 0.0) / rounds;
  return r;
}

CalibrationReport calibrate_f_exact(const ReadoutNoiseModel& model, int qubit) {
  model.validate();
  return calibrate_f_exact(model.xi.at(static_cast<std::size_t>(qubit)), model.eta.at(static_cast<std::size_t>(qubit)));
}

CalibrationReport calibrate_f(const ReadoutNoiseModel& model, int qubit, int rounds, Rng& rng) {
  model.validate();
  return calibrate_f(model.xi.at(static_cast<std::size_t>(qubit)), model.eta.at(static_cast<std::size_t>(qubit)), rounds,
                     rng);
}

// ---------------------------------------------------------------- mitigated estimators

EstimateReport em_cut_estimate(const RecordSet& p, const RecordSet& q, const CutPlan& plan,
                               const UnitaryEnsemble& ensemble, double f_hat_p, double f_hat_q,
                               const ReadoutCorrection& correction) {
  const CutConfigTable tp = cut_config_table(1, f_hat_p), tq = cut_config_table(1, f_hat_q);
  const auto gp = enumerate_global_configs(plan, tp), gq = enumerate_global_configs(plan, tq);
  return multi_cut_estimate(p, q, plan, tp, ensemble, gp, gq, correction);
}

EstimateReport em_cut_fidelity_estimate(const RecordSet& records, const CutPlan& plan, double f_hat,
                                        const StabilizerGroup& group, std::span<const int> sampled,
                                        const ReadoutNoiseModel* correction) {
  const CutConfigTable table = cut_config_table(1, f_hat);
  const auto configs = enumerate_global_configs(plan, table);
  return pure_state_fidelity_estimate(records, plan, table, group, sampled, configs, correction);
}

double em_readout_parity(const OutcomeTable& table, const ReadoutNoiseModel& model, std::span<const int> qubits,
                         std::uint64_t mask) {
  if (static_cast<int>(qubits.size()) != table.bits) throw DimensionError("one qubit per outcome bit required");
  const auto inverse = readout_inverse(model);
  std::vector<const Eigen::Matrix2d*> mats;
  for (int q : qubits) mats.push_back(&inverse.at(static_cast<std::size_t>(q)));
  const auto corrected = apply_bitwise(table.frequencies(), mats);
  double acc = 0.0;
  for (std::size_t s = 0; s < corrected.size(); ++s) acc += (std::popcount(s & mask) & 1) ? -corrected[s] : corrected[s];
  return acc;
}

EstimateReport em_readout_estimate(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                                   const ReadoutNoiseModel& model, const StabilizerGroup& group,
                                   std::span<const int> sampled) {
  const auto configs = enumerate_global_configs(plan, table);
  return pure_state_fidelity_estimate(records, plan, table, group, sampled, configs, &model);
}

}  // namespace xplat
