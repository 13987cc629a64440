#include "xplat/estimators.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <bit>
#include <algorithm>
#include <unordered_map>

#include "xplat/types.hpp"

namespace xplat {

// ---------------------------------------------------------------- reports

nlohmann::json EstimateReport::to_json() const {
  return {{"value", value},   {"std_error", std_error}, {"N", budget.N},
          {"m", budget.m},    {"L", budget.L},          {"T", budget.T},
          {"repetitions", repetitions}};
}

EstimateReport EstimateReport::from_json(const nlohmann::json& j) {
  EstimateReport r;
  r.value = j.at("value").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.budget.N = j.at("N").get<int>();
  r.budget.m = j.at("m").get<std::uint64_t>();
  r.budget.L = j.at("L").get<int>();
  r.budget.T = j.at("T").get<int>();
  r.repetitions = j.at("repetitions").get<int>();
  return r;
}

namespace {

// Mean and standard error of the mean of a sample.
std::pair<double, double> mean_and_se(std::span<const double> values) {
  if (values.empty()) throw EstimationError("no values to aggregate");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

EstimateReport aggregate_repetitions(std::span<const double> values, const EstimationBudget& budget) {
  const auto [mean, se] = mean_and_se(values);
  return EstimateReport{mean, se, budget, static_cast<int>(values.size())};
}

// ---------------------------------------------------------------- distance kernel

int hamming_distance(std::string_view x, std::string_view y) {
  if (x.size() != y.size()) throw DimensionError("hamming distance needs equal lengths");
  int d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
  return d;
}

int hamming_distance(std::uint64_t x, std::uint64_t y) { return std::popcount(x ^ y); }

std::vector<double> distance_kernel_apply(std::span<const double> p, int bits) {
  if (p.size() != (std::size_t{1} << bits)) throw DimensionError("kernel input size mismatch");
  std::vector<double> y(p.begin(), p.end());
  for (int b = 0; b < bits; ++b) {
    const std::size_t stride = std::size_t{1} << b;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (i & stride) continue;
      const double a = y[i], c = y[i | stride];
      y[i] = a - 0.5 * c;
      y[i | stride] = c - 0.5 * a;
    }
  }
  return y;
}

double distance_pair_sum(std::span<const double> p, std::span<const double> q, int bits) {
  if (q.size() != p.size()) throw DimensionError("kernel input size mismatch");
  const auto kp = distance_kernel_apply(p, bits);
  double acc = 0.0;
  for (std::size_t i = 0; i < kp.size(); ++i) acc += kp[i] * q[i];
  return acc;
}

// ---------------------------------------------------------------- cut configurations

std::vector<GlobalConfig> enumerate_global_configs(const CutPlan& plan, const CutConfigTable& table) {
  const int k2 = plan.num_cuts();
  std::vector<GlobalConfig> out;
  std::vector<int> entries(static_cast<std::size_t>(k2), 0);
  while (true) {
    double w = 1.0;
    for (int e : entries) w *= table.coefficient(e);
    out.push_back(GlobalConfig{entries, w});
    int i = k2 - 1;
    while (i >= 0 && ++entries[static_cast<std::size_t>(i)] == table.size()) entries[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return out;
}

std::vector<GlobalConfig> sample_global_configs(const CutPlan& plan, const CutConfigTable& table, int rounds,
                                                Rng& rng) {
  if (rounds < 1) throw InvalidArgument("at least one cut-configuration round required");
  const int k2 = plan.num_cuts();
  const double factor = table.weight_factor();
  std::vector<GlobalConfig> out;
  for (int l = 0; l < rounds; ++l) {
    GlobalConfig g;
    double w = 1.0 / rounds;
    for (int i = 0; i < k2; ++i) {
      const double u = rng.uniform();
      double acc = 0.0;
      int pick = table.size() - 1;
      for (int e = 0; e < table.size(); ++e) {
        acc += table.entries[static_cast<std::size_t>(e)].probability;
        if (u < acc) {
          pick = e;
          break;
        }
      }
      g.entries.push_back(pick);
      w *= factor * (table.entries[static_cast<std::size_t>(pick)].z ? -1.0 : 1.0);
    }
    g.weight = w;
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<CircuitSetting> required_settings(const CutPlan& plan, std::span<const GlobalConfig> configs) {
  std::vector<CircuitSetting> out;
  std::set<std::tuple<int, std::uint32_t, std::string>> seen;
  for (const GlobalConfig& g : configs) {
    for (int j : plan.topological_order()) {
      const auto id = encode_part_config(part_config_for(plan, j, g.entries));
      const auto inputs = plan.prepared_cuts(j).size();
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << inputs); ++b) {
        std::string in = inputs ? bitstring(b, static_cast<int>(inputs)) : std::string();
        if (seen.emplace(j, id, in).second) out.push_back(CircuitSetting{j, id, in});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- contraction machinery

namespace {

std::map<std::vector<int>, double> merge_configs(std::span<const GlobalConfig> configs) {
  std::map<std::vector<int>, double> out;
  for (const GlobalConfig& g : configs) out[g.entries] += g.weight;
  return out;
}

void check_ensemble(const CutPlan& plan, const UnitaryEnsemble& ensemble) {
  if (ensemble.num_parts() != plan.num_parts()) throw EstimationError("ensemble part count differs from the plan");
  const auto sizes = plan.output_sizes();
  for (int j = 0; j < plan.num_parts(); ++j)
    if (ensemble.spec().part_sizes[static_cast<std::size_t>(j)] != sizes[static_cast<std::size_t>(j)])
      throw EstimationError("ensemble part size differs from the plan's output count");
}

/// Reduces one platform's records of one part to a table over its output bits.
/// `select` has one char per measured cut ('0', '1' or '*' to marginalize);
/// `input` has one char per prepared cut ('0', '1' or 'm').
class PartReducer {
 public:
  PartReducer(const RecordSet& records, const CutPlan& plan, const ReadoutNoiseModel* correction)
      : records_(records), plan_(plan) {
    if (correction) inverse_ = readout_inverse(*correction);
  }

  const std::vector<double>& vector(int part, std::uint32_t config, const std::string& select,
                                    const std::string& input, std::uint32_t unitary) {
    std::string key = std::to_string(part) + '|' + std::to_string(config) + '|' + select + '|' + input + '|' +
                      std::to_string(unitary);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    auto v = reduce(part, config, select, input, unitary);
    if (!inverse_.empty() && !v.empty()) {
      const auto qubits = plan_.output_qubits(part);
      std::vector<const Eigen::Matrix2d*> mats;
      for (int q : qubits) mats.push_back(&inverse_.at(static_cast<std::size_t>(q)));
      v = apply_bitwise(v, mats);
    }
    return memo_.emplace(std::move(key), std::move(v)).first->second;
  }

 private:
  std::vector<double> reduce(int part, std::uint32_t config, const std::string& select, std::string input,
                             std::uint32_t unitary) const {
    const auto m_pos = input.find('m');
    if (m_pos != std::string::npos) {
      input[m_pos] = '0';
      auto a = reduce(part, config, select, input, unitary);
      input[m_pos] = '1';
      const auto b = reduce(part, config, select, input, unitary);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (a[i] + b[i]);
      return a;
    }
    const OutcomeTable& table = records_.at(static_cast<std::uint32_t>(part), config, unitary, input);
    const int outs = static_cast<int>(plan_.output_wires(part).size());
    const int cuts = static_cast<int>(select.size());
    if (table.bits != outs + cuts) throw EstimationError("record width does not match the plan");
    std::vector<double> v(std::size_t{1} << outs, 0.0);
    for (std::size_t idx = 0; idx < table.counts.size(); ++idx) {
      if (table.counts[idx] == 0.0) continue;
      bool keep = true;
      for (int c = 0; c < cuts && keep; ++c) {
        const char s = select[static_cast<std::size_t>(c)];
        if (s == '*') continue;
        const auto bit = (idx >> (cuts - 1 - c)) & 1;
        keep = bit == static_cast<std::size_t>(s - '0');
      }
      if (keep) v[idx >> cuts] += table.frequency(idx);
    }
    return v;
  }

  const RecordSet& records_;
  const CutPlan& plan_;
  std::vector<Eigen::Matrix2d> inverse_;
  std::unordered_map<std::string, std::vector<double>> memo_;
};

/// Per-part selector strings for a configuration and an assignment of its active cut bits.
struct PartView {
  std::uint32_t config = 0;
  std::string select;
  std::string input;
};

PartView part_view(const CutPlan& plan, const CutConfigTable& table, int part, const std::vector<int>& entries,
                   const std::vector<int>& bit_of_cut) {
  PartView v;
  v.config = encode_part_config(part_config_for(plan, part, entries));
  for (int i : plan.measured_cuts(part)) {
    const int b = bit_of_cut[static_cast<std::size_t>(i)];
    v.select.push_back(b < 0 ? '*' : static_cast<char>('0' + b));
  }
  for (int i : plan.prepared_cuts(part)) {
    const int b = bit_of_cut[static_cast<std::size_t>(i)];
    v.input.push_back(b < 0 ? 'm' : static_cast<char>('0' + b));
  }
  (void)table;
  return v;
}

void check_entries(const CutPlan& plan, const CutConfigTable& table, const std::vector<int>& entries) {
  if (static_cast<int>(entries.size()) != plan.num_cuts()) throw EstimationError("configuration needs one entry per cut");
  for (int e : entries)
    if (e < 0 || e >= table.size()) throw EstimationError("configuration entry outside the cut table");
}

/// Sum over the cut bits that are live (z = 0) in either configuration of
/// prod_j factor(j, view_p, view_q). With `gq` null only the p side is used.
template <class Factor>
double contract(const CutPlan& plan, const CutConfigTable& table, const std::vector<int>& gp,
                const std::vector<int>* gq, Factor&& factor) {
  check_entries(plan, table, gp);
  if (gq) check_entries(plan, table, *gq);
  const int k2 = plan.num_cuts();
  std::vector<std::pair<int, int>> live;  // (side, cut)
  for (int i = 0; i < k2; ++i)
    if (table.entries[static_cast<std::size_t>(gp[static_cast<std::size_t>(i)])].z == 0) live.emplace_back(0, i);
  if (gq)
    for (int i = 0; i < k2; ++i)
      if (table.entries[static_cast<std::size_t>((*gq)[static_cast<std::size_t>(i)])].z == 0) live.emplace_back(1, i);
  double total = 0.0;
  std::vector<int> bits_p(static_cast<std::size_t>(k2)), bits_q(static_cast<std::size_t>(k2));
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << live.size()); ++a) {
    std::fill(bits_p.begin(), bits_p.end(), -1);
    std::fill(bits_q.begin(), bits_q.end(), -1);
    for (std::size_t v = 0; v < live.size(); ++v) {
      const int bit = static_cast<int>((a >> v) & 1);
      (live[v].first == 0 ? bits_p : bits_q)[static_cast<std::size_t>(live[v].second)] = bit;
    }
    double prod = 1.0;
    for (int j = 0; j < plan.num_parts() && prod != 0.0; ++j) {
      const PartView vp = part_view(plan, table, j, gp, bits_p);
      const PartView vq = gq ? part_view(plan, table, j, *gq, bits_q) : PartView{};
      prod *= factor(j, vp, vq);
    }
    total += prod;
  }
  return total;
}

/// Parity sum_s mu(s) v(s) where mu flips sign on the bits in `mask`.
double parity_sum(std::span<const double> v, std::uint64_t mask) {
  double acc = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) acc += (std::popcount(s & mask) & 1) ? -v[s] : v[s];
  return acc;
}

}  // namespace

// ---------------------------------------------------------------- estimators

EstimateReport distance_cp_estimate(const RecordSet& p, const RecordSet& q, const UnitaryEnsemble& ensemble, int n) {
  if (ensemble.num_parts() != 1 || ensemble.spec().part_sizes[0] != n)
    throw EstimationError("uncut estimator needs a single-part ensemble over all n qubits");
  const int settings = ensemble.num_settings(0);
  std::vector<double> values;
  const double scale = std::ldexp(1.0, n);
  for (int t = 0; t < settings; ++t) {
    const auto& tp = p.at(0, 0, static_cast<std::uint32_t>(t), "");
    const auto& tq = q.at(0, 0, static_cast<std::uint32_t>(t), "");
    if (tp.bits != n || tq.bits != n) throw EstimationError("record width differs from n");
    const auto fp = tp.frequencies(), fq = tq.frequencies();
    double acc = 0.0;
    for (std::uint64_t s = 0; s < fp.size(); ++s) {
      if (fp[s] == 0.0) continue;
      for (std::uint64_t s2 = 0; s2 < fq.size(); ++s2)
        if (fq[s2] != 0.0) acc += std::pow(-2.0, -hamming_distance(s, s2)) * fp[s] * fq[s2];
    }
    values.push_back(scale * acc);
  }
  const auto [mean, se] = mean_and_se(values);
  return EstimateReport{mean, se, EstimationBudget{settings, std::max(p.at(0, 0, 0, "").shots, q.at(0, 0, 0, "").shots), 0, 0}, 1};
}

EstimateReport collision_cp_estimate(const RecordSet& p, const RecordSet& q, int num_settings, int n) {
  if (n < 1 || n > 4) throw EstimationError("collision estimator supports 1 <= n <= 4");
  if (num_settings < 1) throw EstimationError("at least one setting required");
  const double d = std::ldexp(1.0, n);
  std::vector<double> values;
  for (int t = 0; t < num_settings; ++t) {
    const auto& tp = p.at(0, 0, static_cast<std::uint32_t>(t), "");
    const auto& tq = q.at(0, 0, static_cast<std::uint32_t>(t), "");
    if (tp.bits != n || tq.bits != n) throw EstimationError("record width differs from n");
    double acc = 0.0;
    for (std::size_t s = 0; s < tp.counts.size(); ++s) acc += tp.frequency(s) * tq.frequency(s);
    values.push_back((d + 1.0) * acc - 1.0);
  }
  const auto [mean, se] = mean_and_se(values);
  return EstimateReport{mean, se, EstimationBudget{num_settings, std::max(p.at(0, 0, 0, "").shots, q.at(0, 0, 0, "").shots), 0, 0}, 1};
}

EstimateReport parallel_single_cut_estimate(const RecordSet& p, const RecordSet& q, const CutPlan& plan,
                                            const CutConfigTable& table, const UnitaryEnsemble& ensemble) {
  if (plan.num_parts() != 2 || plan.num_cuts() != 1) throw EstimationError("parallel estimator needs two parts and one cut");
  check_ensemble(plan, ensemble);
  const Cut& cut = plan.cut(0);
  const int a = cut.source_part, b = cut.target_part;
  const int na = static_cast<int>(plan.output_wires(a).size());
  const int nb = static_cast<int>(plan.output_wires(b).size());
  const int settings_a = ensemble.num_settings(a), settings_b = ensemble.num_settings(b);

  // Q-A tables carry (outputs, cut bit); the cut bit is the least significant.
  auto qa = [&](const RecordSet& r, int j, int t, int c, int s) {
    const auto& tab = r.at(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(t), "");
    if (c >= 0) return tab.frequency(static_cast<std::size_t>((s << 1) | c));
    return tab.frequency(static_cast<std::size_t>(s << 1)) + tab.frequency(static_cast<std::size_t>((s << 1) | 1));
  };
  auto qb = [&](const RecordSet& r, int j, int t, int c, int s) {
    auto f = [&](const char* in) {
      return r.at(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(t), in)
          .frequency(static_cast<std::size_t>(s));
    };
    if (c == 0) return f("0");
    if (c == 1) return f("1");
    return 0.5 * (f("0") + f("1"));
  };

  double total = 0.0;
  for (int j = 0; j < table.size(); ++j) {
    for (int j2 = 0; j2 < table.size(); ++j2) {
      const double coeff = table.coefficient(j) * table.coefficient(j2);
      const bool live = table.entries[static_cast<std::size_t>(j)].z == 0;
      const bool live2 = table.entries[static_cast<std::size_t>(j2)].z == 0;
      double inner = 0.0;
      for (int c = live ? 0 : -1; c <= (live ? 1 : -1); ++c) {
        for (int c2 = live2 ? 0 : -1; c2 <= (live2 ? 1 : -1); ++c2) {
          double sum_a = 0.0;
          for (int t = 0; t < settings_a; ++t)
            for (int s = 0; s < (1 << na); ++s)
              for (int s2 = 0; s2 < (1 << na); ++s2)
                sum_a += std::pow(-2.0, -hamming_distance(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(s2))) *
                         qa(p, j, t, c, s) * qa(q, j2, t, c2, s2);
          double sum_b = 0.0;
          for (int t = 0; t < settings_b; ++t)
            for (int s = 0; s < (1 << nb); ++s)
              for (int s2 = 0; s2 < (1 << nb); ++s2)
                sum_b += std::pow(-2.0, -hamming_distance(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(s2))) *
                         qb(p, j, t, c, s) * qb(q, j2, t, c2, s2);
          inner += sum_a * sum_b;
        }
      }
      total += coeff * inner;
    }
  }
  const double value = std::ldexp(1.0, plan.n()) * total / (static_cast<double>(settings_a) * settings_b);
  const auto* any = p.records().empty() ? nullptr : &p.records().begin()->second;
  return EstimateReport{value, 0.0, EstimationBudget{std::max(settings_a, settings_b), any ? any->shots : 0, 0, 0}, 1};
}

EstimateReport multi_cut_estimate(const RecordSet& p, const RecordSet& q, const CutPlan& plan,
                                  const CutConfigTable& table, const UnitaryEnsemble& ensemble,
                                  std::span<const GlobalConfig> configs_p, std::span<const GlobalConfig> configs_q,
                                  const ReadoutCorrection& correction) {
  check_ensemble(plan, ensemble);
  if (configs_p.empty() || configs_q.empty()) throw EstimationError("configuration lists must be non-empty");
  PartReducer rp(p, plan, correction.p), rq(q, plan, correction.q);
  std::unordered_map<std::string, double> t_memo;
  auto factor = [&](int j, const PartView& vp, const PartView& vq) {
    std::string key = std::to_string(j) + '|' + std::to_string(vp.config) + '|' + vp.select + '|' + vp.input + '|' +
                      std::to_string(vq.config) + '|' + vq.select + '|' + vq.input;
    auto it = t_memo.find(key);
    if (it != t_memo.end()) return it->second;
    const int bits = static_cast<int>(plan.output_wires(j).size());
    const int settings = ensemble.num_settings(j);
    double acc = 0.0;
    for (int t = 0; t < settings; ++t) {
      const auto& a = rp.vector(j, vp.config, vp.select, vp.input, static_cast<std::uint32_t>(t));
      const auto& b = rq.vector(j, vq.config, vq.select, vq.input, static_cast<std::uint32_t>(t));
      acc += distance_pair_sum(a, b, bits);
    }
    acc /= settings;
    t_memo.emplace(std::move(key), acc);
    return acc;
  };
  const auto wp = merge_configs(configs_p), wq = merge_configs(configs_q);
  double total = 0.0;
  for (const auto& [gp, w1] : wp)
    for (const auto& [gq, w2] : wq)
      if (w1 != 0.0 && w2 != 0.0) total += w1 * w2 * contract(plan, table, gp, &gq, factor);
  const double value = std::ldexp(1.0, plan.n()) * total;
  int max_settings = 0;
  for (int j = 0; j < plan.num_parts(); ++j) max_settings = std::max(max_settings, ensemble.num_settings(j));
  const bool enumerated = configs_p.size() == wp.size() && wp.size() == std::size_t{1} << (2 * plan.num_cuts()) &&
                          configs_p.size() == configs_q.size();
  const auto* any = p.records().empty() ? nullptr : &p.records().begin()->second;
  return EstimateReport{value, 0.0,
                        EstimationBudget{max_settings, any ? any->shots : 0,
                                         enumerated ? 0 : static_cast<int>(configs_p.size()), 0},
                        1};
}

std::pair<RecordSet, RecordSet> split_records(const RecordSet& records, Rng& rng) {
  RecordSet first(records.platform()), second(records.platform());
  for (const auto& [key, table] : records.records()) {
    if (table.exact()) {
      first.insert(key, table);
      second.insert(key, table);
      continue;
    }
    if (table.shots < 2) throw EstimationError("split-sample estimation needs at least two shots per record");
    std::vector<std::uint64_t> remaining(table.counts.size()), taken(table.counts.size(), 0);
    for (std::size_t i = 0; i < table.counts.size(); ++i) remaining[i] = static_cast<std::uint64_t>(table.counts[i]);
    std::uint64_t left = table.shots;
    for (std::uint64_t k = 0; k < table.shots / 2; ++k) {
      std::uint64_t r = rng.below(left);
      std::size_t i = 0;
      while (r >= remaining[i]) r -= remaining[i++];
      --remaining[i];
      ++taken[i];
      --left;
    }
    first.insert(key, make_count_table(table.bits, taken));
    second.insert(key, make_count_table(table.bits, remaining));
  }
  return {std::move(first), std::move(second)};
}

EstimateReport purity_estimate(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                               const UnitaryEnsemble& ensemble, std::span<const GlobalConfig> configs, Rng& split_rng,
                               const ReadoutNoiseModel* correction) {
  const auto [a, b] = split_records(records, split_rng);
  return multi_cut_estimate(a, b, plan, table, ensemble, configs, configs, ReadoutCorrection{correction, correction});
}

EstimateReport cross_platform_fidelity(const EstimateReport& overlap, const EstimateReport& purity_p,
                                       const EstimateReport& purity_q) {
  if (!(purity_p.value > 0.0) || !(purity_q.value > 0.0))
    throw EstimationError("nonpositive purity estimate; increase the sampling budget");
  const double norm = std::sqrt(purity_p.value * purity_q.value);
  const double f = overlap.value / norm;
  const double d_o = overlap.std_error / norm;
  const double d_p = f * purity_p.std_error / (2.0 * purity_p.value);
  const double d_q = f * purity_q.std_error / (2.0 * purity_q.value);
  return EstimateReport{f, std::sqrt(d_o * d_o + d_p * d_p + d_q * d_q), overlap.budget, overlap.repetitions};
}

namespace {

/// Bit mask over a part's output bits marking the sites where `pauli` acts.
std::uint64_t part_support_mask(const CutPlan& plan, int part, const PauliString& pauli) {
  const auto qubits = plan.output_qubits(part);
  const auto letters = pauli.letters();
  std::uint64_t mask = 0;
  for (std::size_t b = 0; b < qubits.size(); ++b)
    if (letters[static_cast<std::size_t>(qubits[b])] != 'I') mask |= std::uint64_t{1} << (qubits.size() - 1 - b);
  return mask;
}

}  // namespace

EstimateReport pure_state_fidelity_estimate(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                                            const StabilizerGroup& group, std::span<const int> sampled,
                                            std::span<const GlobalConfig> configs,
                                            const ReadoutNoiseModel* correction) {
  if (group.n != plan.n()) throw EstimationError("stabilizer group size differs from the plan");
  if (sampled.empty()) throw EstimationError("at least one stabilizer sample required");
  PartReducer reducer(records, plan, correction);
  const auto weights = merge_configs(configs);
  std::map<int, double> per_element;
  std::vector<double> values;
  for (int t : sampled) {
    if (t < 0 || t >= static_cast<int>(group.elements.size())) throw EstimationError("stabilizer index out of range");
    auto it = per_element.find(t);
    if (it == per_element.end()) {
      const PauliString& pauli = group.elements[static_cast<std::size_t>(t)];
      std::vector<std::uint64_t> masks;
      for (int j = 0; j < plan.num_parts(); ++j) masks.push_back(part_support_mask(plan, j, pauli));
      auto factor = [&](int j, const PartView& v, const PartView&) {
        const auto& vec = reducer.vector(j, v.config, v.select, v.input, static_cast<std::uint32_t>(t));
        return parity_sum(vec, masks[static_cast<std::size_t>(j)]);
      };
      double acc = 0.0;
      for (const auto& [g, w] : weights)
        if (w != 0.0) acc += w * contract(plan, table, g, nullptr, factor);
      it = per_element.emplace(t, pauli.sign() * acc).first;
    }
    values.push_back(it->second);
  }
  const auto [mean, se] = mean_and_se(values);
  const auto* any = records.records().empty() ? nullptr : &records.records().begin()->second;
  return EstimateReport{mean, se, EstimationBudget{1, any ? any->shots : 0, 0, static_cast<int>(sampled.size())}, 1};
}

namespace {

/// +1 or -1 if W^dagger Z W = +-P for the single-qubit Pauli letter P, 0 otherwise.
int diagonalizing_sign(const Mat2& w, char letter) {
  const Pauli pl = letter == 'X' ? Pauli::X : letter == 'Y' ? Pauli::Y : Pauli::Z;
  const cplx overlap = (w.adjoint() * pauli_matrix(Pauli::Z) * w * pauli_matrix(pl)).trace() / 2.0;
  if (std::abs(std::abs(overlap.real()) - 1.0) < 1e-9) return overlap.real() > 0 ? 1 : -1;
  return 0;
}

}  // namespace

TomographyResult pauli_tomography(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                                  const UnitaryEnsemble& ensemble, std::span<const GlobalConfig> configs,
                                  const std::vector<PauliString>& paulis, const QuantumState& target) {
  check_ensemble(plan, ensemble);
  if (target.num_qubits() != plan.n()) throw DimensionError("target state size differs from the plan");
  PartReducer reducer(records, plan, nullptr);
  const auto weights = merge_configs(configs);
  TomographyResult out;
  double sq = 0.0;
  for (const PauliString& pauli : paulis) {
    if (pauli.size() != plan.n()) throw DimensionError("Pauli length differs from the plan");
    const auto letters = pauli.letters();
    // Compatible settings and their signs per part.
    std::vector<std::vector<std::pair<int, int>>> compatible(static_cast<std::size_t>(plan.num_parts()));
    std::vector<std::uint64_t> masks;
    bool measurable = true;
    for (int j = 0; j < plan.num_parts() && measurable; ++j) {
      const auto qubits = plan.output_qubits(j);
      masks.push_back(part_support_mask(plan, j, pauli));
      for (int t = 0; t < ensemble.num_settings(j); ++t) {
        const auto mats = ensemble.matrices(j, t);
        int sign = 1;
        for (std::size_t b = 0; b < qubits.size() && sign != 0; ++b) {
          const char l = letters[static_cast<std::size_t>(qubits[b])];
          if (l != 'I') sign *= diagonalizing_sign(mats[b], l);
        }
        if (sign != 0) compatible[static_cast<std::size_t>(j)].emplace_back(t, sign);
      }
      measurable = !compatible[static_cast<std::size_t>(j)].empty();
    }
    out.paulis.push_back(pauli);
    out.exact.push_back(pauli_expectation(target, pauli));
    if (!measurable) {
      out.estimates.push_back(std::nullopt);
      continue;
    }
    auto factor = [&](int j, const PartView& v, const PartView&) {
      const auto& list = compatible[static_cast<std::size_t>(j)];
      double acc = 0.0;
      for (const auto& [t, sign] : list)
        acc += sign * parity_sum(reducer.vector(j, v.config, v.select, v.input, static_cast<std::uint32_t>(t)),
                                 masks[static_cast<std::size_t>(j)]);
      return acc / static_cast<double>(list.size());
    };
    double value = 0.0;
    for (const auto& [g, w] : weights)
      if (w != 0.0) value += w * contract(plan, table, g, nullptr, factor);
    value *= pauli.sign();
    out.estimates.emplace_back(value);
    sq += (value - out.exact.back()) * (value - out.exact.back());
    ++out.estimated;
  }
  out.mse = out.estimated ? sq / out.estimated : 0.0;
  return out;
}

}  // namespace xplat
