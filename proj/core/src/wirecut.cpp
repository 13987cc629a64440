#include "xplat/wirecut.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace xplat {

// ---------------------------------------------------------------- channels

ChannelMatrix phi0_closed_form(int k1) {
  if (k1 < 1 || k1 > 2) throw InvalidArgument("phi channels support k1 in {1, 2}");
  return identity_projector(k1) + (1.0 / (std::ldexp(1.0, k1) + 1.0)) * traceless_projector(k1);
}

ChannelMatrix clifford_measure_prepare_average(int k1) {
  if (k1 < 1 || k1 > 2) throw InvalidArgument("phi channels support k1 in {1, 2}");
  const ChannelMatrix m = measure_prepare(k1);
  const auto dim = m.entries().rows();
  RMatrix acc = RMatrix::Zero(dim, dim);
  auto accumulate = [&](const CMatrix& v) {
    const RMatrix r = ChannelMatrix::from_unitary(v).entries();
    acc += r.transpose() * m.entries() * r;
  };
  std::size_t count = 0;
  if (k1 == 1) {
    for (const Mat2& c : single_qubit_clifford_table()) accumulate(c);
    count = single_qubit_clifford_table().size();
  } else {
    for (const CMatrix& c : two_qubit_clifford_group()) accumulate(c);
    count = two_qubit_clifford_group().size();
  }
  return ChannelMatrix(k1, acc / static_cast<double>(count));
}

std::pair<ChannelMatrix, ChannelMatrix> phi_channels(int k1) {
  ChannelMatrix phi0 = clifford_measure_prepare_average(k1);
  const double tol = k1 == 1 ? 1e-12 : 1e-10;
  if (phi0.max_abs_diff(phi0_closed_form(k1)) > tol)
    throw Error("enumerated Clifford average disagrees with the closed form");
  return {std::move(phi0), identity_projector(k1)};
}

double identity_reconstruction_check(int k1) {
  const auto [phi0, phi1] = phi_channels(k1);
  const double d = std::ldexp(1.0, k1);
  const ChannelMatrix recon = (d + 1.0) * phi0 - d * phi1;
  return recon.max_abs_diff(ChannelMatrix::identity(k1));
}

// ---------------------------------------------------------------- plans

CutPlan::CutPlan(int n, std::vector<PartLayout> parts, std::vector<Cut> cuts)
    : n_(n), parts_(std::move(parts)), cuts_(std::move(cuts)) {
  if (n < 1 || n > kMaxQubits) throw DimensionError("plan qubit count out of range");
  if (parts_.empty()) throw InvalidArgument("plan needs at least one part");
  const auto r = parts_.size();
  outputs_.resize(r);
  measured_.resize(r);
  prepared_.resize(r);
  std::vector<std::vector<int>> source_of(r), target_of(r);
  for (std::size_t j = 0; j < r; ++j) {
    const auto& q = parts_[j].global_qubits;
    if (q.empty() || static_cast<int>(q.size()) > kMaxQubits) throw InvalidArgument("part has no wires");
    std::set<int> distinct(q.begin(), q.end());
    if (distinct.size() != q.size()) throw InvalidArgument("part maps two wires to one qubit");
    for (int g : q)
      if (g < 0 || g >= n) throw DimensionError("part wire maps outside the register");
    source_of[j].assign(q.size(), -1);
    target_of[j].assign(q.size(), -1);
  }
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    const Cut& c = cuts_[i];
    auto check = [&](int part, int wire) {
      if (part < 0 || part >= static_cast<int>(r)) throw InvalidArgument("cut references a missing part");
      if (wire < 0 || wire >= static_cast<int>(parts_[static_cast<std::size_t>(part)].global_qubits.size()))
        throw InvalidArgument("cut references a missing wire");
    };
    check(c.source_part, c.source_wire);
    check(c.target_part, c.target_wire);
    if (c.source_part == c.target_part) throw InvalidArgument("cut connects a part to itself");
    const auto sp = static_cast<std::size_t>(c.source_part), tp = static_cast<std::size_t>(c.target_part);
    const auto sw = static_cast<std::size_t>(c.source_wire), tw = static_cast<std::size_t>(c.target_wire);
    if (parts_[sp].global_qubits[sw] != parts_[tp].global_qubits[tw])
      throw InvalidArgument("cut must carry one global qubit");
    if (source_of[sp][sw] >= 0 || target_of[tp][tw] >= 0) throw InvalidArgument("wire used by two cuts");
    source_of[sp][sw] = static_cast<int>(i);
    target_of[tp][tw] = static_cast<int>(i);
  }
  std::vector<int> output_count(static_cast<std::size_t>(n), 0), fresh_count(static_cast<std::size_t>(n), 0);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t w = 0; w < parts_[j].global_qubits.size(); ++w) {
      const int g = parts_[j].global_qubits[w];
      if (source_of[j][w] >= 0)
        measured_[j].push_back(source_of[j][w]);
      else {
        outputs_[j].push_back(static_cast<int>(w));
        ++output_count[static_cast<std::size_t>(g)];
      }
      if (target_of[j][w] >= 0)
        prepared_[j].push_back(target_of[j][w]);
      else
        ++fresh_count[static_cast<std::size_t>(g)];
    }
  }
  for (int g = 0; g < n; ++g) {
    if (output_count[static_cast<std::size_t>(g)] != 1)
      throw InvalidArgument("qubit " + std::to_string(g) + " must be measured as an output exactly once");
    if (fresh_count[static_cast<std::size_t>(g)] != 1)
      throw InvalidArgument("qubit " + std::to_string(g) + " must start fresh exactly once");
  }
  // Kahn's algorithm over part dependencies.
  std::vector<int> indegree(r, 0);
  for (const Cut& c : cuts_) ++indegree[static_cast<std::size_t>(c.target_part)];
  std::vector<int> ready;
  for (std::size_t j = 0; j < r; ++j)
    if (indegree[j] == 0) ready.push_back(static_cast<int>(j));
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const int j = ready.back();
    ready.pop_back();
    order_.push_back(j);
    for (const Cut& c : cuts_)
      if (c.source_part == j && --indegree[static_cast<std::size_t>(c.target_part)] == 0) ready.push_back(c.target_part);
  }
  if (order_.size() != r) throw InvalidArgument("cut dependency graph has a cycle");
}

std::vector<int> CutPlan::output_qubits(int j) const {
  std::vector<int> out;
  for (int w : output_wires(j)) out.push_back(part(j).global_qubits[static_cast<std::size_t>(w)]);
  return out;
}

std::vector<int> CutPlan::output_sizes() const {
  std::vector<int> out;
  for (const auto& o : outputs_) out.push_back(static_cast<int>(o.size()));
  return out;
}

bool CutPlan::is_chain() const {
  for (int j = 0; j < num_parts(); ++j)
    if (measured_cuts(j).size() > 1 || prepared_cuts(j).size() > 1) return false;
  return true;
}

void validate_circuits(const CutPlan& plan, const PartCircuits& circuits) {
  if (static_cast<int>(circuits.size()) != plan.num_parts()) throw DimensionError("one circuit per part required");
  for (int j = 0; j < plan.num_parts(); ++j)
    if (circuits[static_cast<std::size_t>(j)].num_qubits() != static_cast<int>(plan.part(j).global_qubits.size()))
      throw DimensionError("part circuit width differs from its layout");
}

QuantumState uncut_state(const CutPlan& plan, const PartCircuits& circuits) {
  validate_circuits(plan, circuits);
  Circuit global(plan.n());
  for (int j : plan.topological_order()) global.append(circuits[static_cast<std::size_t>(j)], plan.part(j).global_qubits);
  return run_circuit(global, QuantumState::zero(plan.n()));
}

CutPlan chain_plan(const std::vector<int>& part_sizes) {
  if (part_sizes.empty()) throw InvalidArgument("chain needs at least one part");
  std::vector<PartLayout> parts;
  std::vector<Cut> cuts;
  int offset = 0;
  for (std::size_t j = 0; j < part_sizes.size(); ++j) {
    const int size = part_sizes[j];
    if (size < 1) throw InvalidArgument("chain part sizes must be positive");
    PartLayout layout;
    for (int w = 0; w < size; ++w) layout.global_qubits.push_back(offset + w);
    if (j > 0) cuts.push_back(Cut{static_cast<int>(j) - 1, part_sizes[j - 1] - 1, static_cast<int>(j), 0});
    offset += size - 1;
    parts.push_back(std::move(layout));
  }
  return CutPlan(offset + 1, std::move(parts), std::move(cuts));
}

CutCircuit ghz_chain(const std::vector<int>& part_sizes) {
  CutCircuit out{chain_plan(part_sizes), {}};
  for (std::size_t j = 0; j < part_sizes.size(); ++j) {
    Circuit c(part_sizes[j]);
    if (j == 0) c.h(0);
    for (int w = 0; w + 1 < part_sizes[j]; ++w) c.cnot(w, w + 1);
    out.circuits.push_back(std::move(c));
  }
  return out;
}

CutCircuit ghz_cut_plan(int n) {
  if (n < 3 || n % 2 == 0) throw InvalidArgument("GHZ cut plan needs odd n >= 3");
  return ghz_chain({(n + 1) / 2, (n + 1) / 2});
}

PartCircuits random_part_circuits(const CutPlan& plan, int layers, Rng& rng) {
  PartCircuits out;
  for (int j = 0; j < plan.num_parts(); ++j) {
    const int w = static_cast<int>(plan.part(j).global_qubits.size());
    Circuit c(w);
    for (int layer = 0; layer < layers; ++layer) {
      for (int q = 0; q < w; ++q) c.unitary({q}, haar_unitary(2, rng));
      for (int q = layer % 2; q + 1 < w; q += 2) c.unitary({q, q + 1}, haar_unitary(4, rng));
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------- configurations

std::uint32_t encode_part_config(const PartConfig& config) {
  std::uint32_t id = 0;
  for (int e : config.measured) id = id * 4 + static_cast<std::uint32_t>(e);
  for (int e : config.prepared) id = id * 4 + static_cast<std::uint32_t>(e);
  return id;
}

PartConfig decode_part_config(const CutPlan& plan, int part, std::uint32_t id) {
  PartConfig c;
  c.measured.resize(plan.measured_cuts(part).size());
  c.prepared.resize(plan.prepared_cuts(part).size());
  for (auto it = c.prepared.rbegin(); it != c.prepared.rend(); ++it) {
    *it = static_cast<int>(id % 4);
    id /= 4;
  }
  for (auto it = c.measured.rbegin(); it != c.measured.rend(); ++it) {
    *it = static_cast<int>(id % 4);
    id /= 4;
  }
  if (id != 0) throw InvalidArgument("configuration id out of range for part " + std::to_string(part));
  return c;
}

PartConfig part_config_for(const CutPlan& plan, int part, std::span<const int> cut_entries) {
  if (static_cast<int>(cut_entries.size()) != plan.num_cuts()) throw DimensionError("one entry per cut required");
  PartConfig c;
  for (int i : plan.measured_cuts(part)) c.measured.push_back(cut_entries[static_cast<std::size_t>(i)]);
  for (int i : plan.prepared_cuts(part)) c.prepared.push_back(cut_entries[static_cast<std::size_t>(i)]);
  return c;
}

std::vector<CircuitSetting> part_configurations(const CutPlan& plan, int part, int table_size) {
  const auto digits = plan.measured_cuts(part).size() + plan.prepared_cuts(part).size();
  const auto inputs = plan.prepared_cuts(part).size();
  std::uint32_t configs = 1;
  for (std::size_t i = 0; i < digits; ++i) configs *= static_cast<std::uint32_t>(table_size);
  std::vector<CircuitSetting> out;
  for (std::uint32_t id = 0; id < configs; ++id)
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << inputs); ++b)
      out.push_back(CircuitSetting{part, id, inputs ? bitstring(b, static_cast<int>(inputs)) : std::string()});
  return out;
}

std::vector<CircuitSetting> enumerate_configurations(const CutPlan& plan) {
  if (!plan.is_chain()) throw InvalidArgument("closed-form configuration enumeration needs a chain plan");
  std::vector<CircuitSetting> out;
  for (int j : plan.topological_order()) {
    auto part = part_configurations(plan, j);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

namespace {

std::vector<double> part_probabilities(const CutPlan& plan, const PartCircuits& circuits, int part,
                                       const PartConfig& config, const std::string& cut_input,
                                       std::span<const Mat2> setting, const CutConfigTable& table,
                                       const ExecOptions& options) {
  const auto m_pos = cut_input.find('m');
  if (m_pos != std::string::npos) {
    std::string a = cut_input, b = cut_input;
    a[m_pos] = '0';
    b[m_pos] = '1';
    auto pa = part_probabilities(plan, circuits, part, config, a, setting, table, options);
    const auto pb = part_probabilities(plan, circuits, part, config, b, setting, table, options);
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] = 0.5 * (pa[i] + pb[i]);
    return pa;
  }
  const auto& layout = plan.part(part);
  const int w = static_cast<int>(layout.global_qubits.size());
  const auto& prepared = plan.prepared_cuts(part);
  const auto& measured = plan.measured_cuts(part);
  const auto& outputs = plan.output_wires(part);

  Circuit full(w);
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const int wire = plan.cut(prepared[i]).target_wire;
    const char bit = cut_input[i];
    if (bit != '0' && bit != '1') throw InvalidArgument("cut input characters must be 0, 1 or m");
    if (bit == '1') full.x(wire);
    const auto& entry = table.entries.at(static_cast<std::size_t>(config.prepared[i]));
    if (!entry.unitary.isIdentity(1e-15)) full.unitary({wire}, entry.unitary.adjoint());
  }
  full.append(circuits[static_cast<std::size_t>(part)]);
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const int wire = plan.cut(measured[i]).source_wire;
    const auto& entry = table.entries.at(static_cast<std::size_t>(config.measured[i]));
    if (!entry.unitary.isIdentity(1e-15)) full.unitary({wire}, entry.unitary);
  }
  for (std::size_t i = 0; i < outputs.size(); ++i)
    if (!setting[i].isIdentity(1e-15)) full.unitary({outputs[i]}, setting[i]);

  const QuantumState state = run_circuit(full, QuantumState::zero(w), options.gate_noise);
  const auto local = measurement_probabilities(state);

  // Reorder local basis indices into (outputs, measured cuts) bit order.
  std::vector<int> wire_order(outputs.begin(), outputs.end());
  for (int c : measured) wire_order.push_back(plan.cut(c).source_wire);
  const int bits = static_cast<int>(wire_order.size());
  std::vector<double> probs(std::size_t{1} << bits, 0.0);
  for (std::uint64_t idx = 0; idx < local.size(); ++idx) {
    std::uint64_t out = 0;
    for (int b = 0; b < bits; ++b) {
      const int wire = wire_order[static_cast<std::size_t>(b)];
      out = (out << 1) | ((idx >> (w - 1 - wire)) & 1);
    }
    probs[out] += local[idx];
  }
  if (options.readout) {
    std::vector<int> qubits;
    for (int wire : wire_order) qubits.push_back(layout.global_qubits[static_cast<std::size_t>(wire)]);
    probs = apply_readout_noise(probs, *options.readout, qubits);
  }
  return probs;
}

}  // namespace

OutcomeTable execute_part(const CutPlan& plan, const PartCircuits& circuits, int part, std::uint32_t config,
                          const std::string& cut_input, std::span<const Mat2> setting, const CutConfigTable& table,
                          const ExecOptions& options, Rng* rng) {
  validate_circuits(plan, circuits);
  if (part < 0 || part >= plan.num_parts()) throw InvalidArgument("part id out of range");
  if (cut_input.size() != plan.prepared_cuts(part).size())
    throw InvalidArgument("cut input needs one character per prepared cut of part " + std::to_string(part));
  if (setting.size() != plan.output_wires(part).size())
    throw DimensionError("setting needs one unitary per output wire");
  const PartConfig pc = decode_part_config(plan, part, config);
  for (int e : pc.measured)
    if (e >= table.size()) throw InvalidArgument("configuration entry outside the cut table");
  for (int e : pc.prepared)
    if (e >= table.size()) throw InvalidArgument("configuration entry outside the cut table");
  auto probs = part_probabilities(plan, circuits, part, pc, cut_input, setting, table, options);
  const int bits = static_cast<int>(plan.output_wires(part).size() + plan.measured_cuts(part).size());
  if (options.shots == 0) return make_exact_table(bits, std::move(probs));
  if (!rng) throw InvalidArgument("sampled execution needs a random stream");
  return make_count_table(bits, sample_shots(probs, options.shots, *rng));
}

}  // namespace xplat
