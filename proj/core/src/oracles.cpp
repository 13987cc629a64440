#include "xplat/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "xplat/liouville.hpp"
#include "xplat/pauli.hpp"

namespace xplat {

// ---------------------------------------------------------------- exact estimator expectations

namespace {

void apply_circuit(CMatrix& rho, int n, const Circuit& circuit, const std::vector<int>& wires) {
  for (const Gate& g : circuit.gates()) {
    std::vector<int> targets;
    for (int t : g.targets) targets.push_back(wires[static_cast<std::size_t>(t)]);
    apply_matrix(rho, n, targets, g.matrix());
  }
}

// z = 0: rotate by V, dephase in Z, rotate back. z = 1: replace the qubit by I/2.
void apply_cut_channel(CMatrix& rho, int n, int qubit, const CutConfigEntry& entry) {
  const std::vector<int> target{qubit};
  if (entry.z == 1) {
    CMatrix acc = rho;
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      CMatrix term = rho;
      apply_matrix(term, n, target, pauli_matrix(p));
      acc += term;
    }
    rho = 0.25 * acc;
    return;
  }
  apply_matrix(rho, n, target, entry.unitary);
  const std::uint64_t bit = std::uint64_t{1} << (n - 1 - qubit);
  for (Eigen::Index r = 0; r < rho.rows(); ++r)
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
      if (((static_cast<std::uint64_t>(r) ^ static_cast<std::uint64_t>(c)) & bit) != 0) rho(r, c) = 0.0;
  apply_matrix(rho, n, target, CMatrix(entry.unitary.adjoint()));
}

}  // namespace

CMatrix reconstructed_operator(const CutPlan& plan, const PartCircuits& circuits, const CutConfigTable& table) {
  validate_circuits(plan, circuits);
  const int n = plan.n();
  if (n > 8) throw DimensionError("oracle reconstruction is limited to 8 qubits");
  const int cuts = plan.num_cuts();
  const int entries = table.size();
  const auto dim = static_cast<Eigen::Index>(dim_of(n));
  CMatrix total = CMatrix::Zero(dim, dim);
  std::vector<int> choice(static_cast<std::size_t>(cuts), 0);
  while (true) {
    double weight = 1.0;
    for (int c = 0; c < cuts; ++c) weight *= table.coefficient(choice[static_cast<std::size_t>(c)]);
    CMatrix rho = CMatrix::Zero(dim, dim);
    rho(0, 0) = 1.0;
    for (int j : plan.topological_order()) {
      apply_circuit(rho, n, circuits[static_cast<std::size_t>(j)], plan.part(j).global_qubits);
      for (int c : plan.measured_cuts(j)) {
        const Cut& cut = plan.cut(c);
        const int qubit = plan.part(cut.source_part).global_qubits[static_cast<std::size_t>(cut.source_wire)];
        apply_cut_channel(rho, n, qubit, table.entries[static_cast<std::size_t>(choice[static_cast<std::size_t>(c)])]);
      }
    }
    total += weight * rho;
    int c = 0;
    while (c < cuts && ++choice[static_cast<std::size_t>(c)] == entries) choice[static_cast<std::size_t>(c++)] = 0;
    if (c == cuts) break;
  }
  return total;
}

double distance_form(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols()) throw DimensionError("operators differ in size");
  const int n = std::countr_zero(static_cast<std::uint64_t>(a.rows()));
  if (dim_of(n) != static_cast<std::uint64_t>(a.rows())) throw DimensionError("operator size is not a power of two");
  const std::array<Mat2, 3> basis{Mat2::Identity(), rx_matrix(std::numbers::pi / 2), ry_matrix(std::numbers::pi / 2)};
  const auto dim = a.rows();
  // Hamming kernel (-2)^{-D}.
  RMatrix kernel(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    for (Eigen::Index t = 0; t < dim; ++t)
      kernel(s, t) = std::pow(-2.0, -std::popcount(static_cast<std::uint64_t>(s ^ t)));
  std::uint64_t settings = 1;
  for (int q = 0; q < n; ++q) settings *= 3;
  double acc = 0.0;
  for (std::uint64_t idx = 0; idx < settings; ++idx) {
    CMatrix u = CMatrix::Identity(1, 1);
    std::uint64_t rest = idx;
    for (int q = 0; q < n; ++q) {
      const Mat2& m = basis[rest % 3];
      CMatrix next(u.rows() * 2, u.cols() * 2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) next.block(r * u.rows(), c * u.cols(), u.rows(), u.cols()) = m(r, c) * u;
      u = next;
      rest /= 3;
    }
    const RVector pa = (u * a * u.adjoint()).diagonal().real();
    const RVector pb = (u * b * u.adjoint()).diagonal().real();
    acc += pa.dot(kernel * pb);
  }
  return std::ldexp(acc / static_cast<double>(settings), n);
}

double exact_estimator_expectation(const CutPlan& plan, const PartCircuits& p, const PartCircuits& q,
                                   OracleEstimator estimator) {
  if (plan.n() > 6) throw DimensionError("exact estimator expectations are limited to 6 qubits");
  const CMatrix a = reconstructed_operator(plan, p);
  const CMatrix b = reconstructed_operator(plan, q);
  if (estimator == OracleEstimator::kDistance) return distance_form(a, b);
  if (plan.num_cuts() != 0) throw InvalidArgument("the collision estimator needs an uncut plan");
  const double d = static_cast<double>(a.rows());
  double acc = 0.0;
  const auto& unitaries = mub_unitaries(plan.n());
  for (const CMatrix& w : unitaries) {
    const RVector pa = (w * a * w.adjoint()).diagonal().real();
    const RVector pb = (w * b * w.adjoint()).diagonal().real();
    acc += pa.dot(pb);
  }
  return (d + 1.0) * acc / static_cast<double>(unitaries.size()) - 1.0;
}

double exact_stabilizer_expectation(const CutPlan& plan, const PartCircuits& circuits, const StabilizerGroup& group,
                                    const CutConfigTable& table) {
  if (group.n != plan.n()) throw DimensionError("stabilizer group width differs from the plan");
  const CMatrix a = reconstructed_operator(plan, circuits, table);
  double acc = 0.0;
  for (const PauliString& s : group.elements) acc += (a * s.matrix()).trace().real();
  return acc / static_cast<double>(group.elements.size());
}

// ---------------------------------------------------------------- enumeration lemmas

std::vector<std::vector<int>> permutations(int t) {
  if (t < 1 || t > 8) throw InvalidArgument("permutation order must lie in [1, 8]");
  std::vector<int> p(static_cast<std::size_t>(t));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

int cycle_count(std::span<const int> perm) {
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
  }
  return cycles;
}

CMatrix permutation_operator(std::span<const int> perm, int d) {
  const auto t = static_cast<int>(perm.size());
  Eigen::Index dim = 1;
  for (int i = 0; i < t; ++i) dim *= d;
  CMatrix v = CMatrix::Zero(dim, dim);
  std::vector<int> in(static_cast<std::size_t>(t)), out(static_cast<std::size_t>(t));
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index rest = idx;
    for (int i = t - 1; i >= 0; --i) {
      in[static_cast<std::size_t>(i)] = static_cast<int>(rest % d);
      rest /= d;
    }
    // Slot perm[i] of the output carries slot i of the input.
    for (int i = 0; i < t; ++i) out[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = in[static_cast<std::size_t>(i)];
    Eigen::Index target = 0;
    for (int i = 0; i < t; ++i) target = target * d + out[static_cast<std::size_t>(i)];
    v(target, idx) = 1.0;
  }
  return v;
}

const PermutationCell& PermutationSumReport::cell(int s, int sp, int b, int bp) const {
  for (const auto& c : cells)
    if (c.bits == std::array<int, 4>{s, sp, b, bp}) return c;
  throw InvalidArgument("no such cell");
}

PermutationSumReport permutation_sum_check() {
  const auto perms = permutations(4);
  std::vector<CMatrix> ops;
  for (const auto& p : perms) ops.push_back(permutation_operator(p, 2));
  PermutationSumReport report;
  for (int idx = 0; idx < 16; ++idx) {
    PermutationCell cell;
    for (int i = 0; i < 4; ++i) cell.bits[static_cast<std::size_t>(i)] = (idx >> (3 - i)) & 1;
    const int dist = (cell.bits[0] ^ cell.bits[1]) + (cell.bits[2] ^ cell.bits[3]);
    cell.y1 = std::pow(-2.0, -dist);
    // tr(V |x><x|) = <x|V|x>.
    double trace = 0.0;
    for (const CMatrix& v : ops) trace += v(idx, idx).real();
    cell.y2 = static_cast<int>(std::lround(trace));
    report.total += cell.y1 * cell.y2;
    report.cells.push_back(cell);
  }
  return report;
}

WeingartenTable weingarten_table(int t, int d) {
  if (t < 1 || t > 4) throw InvalidArgument("Weingarten tables support t in [1, 4]");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  WeingartenTable w;
  w.t = t;
  w.d = d;
  w.perms = permutations(t);
  const auto k = static_cast<Eigen::Index>(w.perms.size());
  w.gram = RMatrix(k, k);
  std::vector<int> inv(static_cast<std::size_t>(t)), composed(static_cast<std::size_t>(t));
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto& zeta = w.perms[static_cast<std::size_t>(a)];
    for (int i = 0; i < t; ++i) inv[static_cast<std::size_t>(zeta[static_cast<std::size_t>(i)])] = i;
    for (Eigen::Index b = 0; b < k; ++b) {
      const auto& tau = w.perms[static_cast<std::size_t>(b)];
      for (int i = 0; i < t; ++i) composed[static_cast<std::size_t>(i)] = inv[static_cast<std::size_t>(tau[static_cast<std::size_t>(i)])];
      w.gram(a, b) = std::pow(static_cast<double>(d), cycle_count(composed));
    }
  }
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(w.gram);
  cod.setThreshold(1e-10);
  w.coeff = cod.pseudoInverse();
  return w;
}

WeingartenReport weingarten_sum_check(int t, int d) {
  const WeingartenTable w = weingarten_table(t, d);
  WeingartenReport r;
  double falling = 1.0;
  for (int i = 0; i < t; ++i) falling *= static_cast<double>(d + t - 1 - i);
  r.expected = 1.0 / falling;
  for (Eigen::Index a = 0; a < w.coeff.rows(); ++a) {
    r.row_sums.push_back(w.coeff.row(a).sum());
    r.max_deviation = std::max(r.max_deviation, std::abs(r.row_sums.back() - r.expected));
  }
  r.pseudo_inverse_residual = (w.coeff * w.gram * w.coeff - w.coeff).cwiseAbs().maxCoeff();
  return r;
}

double schur_average_check(int k) {
  if (k < 1 || k > 2) throw InvalidArgument("Schur average check supports k in {1, 2}");
  std::vector<CMatrix> group;
  if (k == 1)
    for (const Mat2& c : single_qubit_clifford_table()) group.emplace_back(c);
  else
    group = two_qubit_clifford_group();
  const auto dephase = [](CMatrix rho) {
    const CVector diag = rho.diagonal();
    return CMatrix(diag.asDiagonal());
  };
  const ChannelMatrix twirled = ChannelMatrix::from_map(k, [&](const CMatrix& rho) {
    CMatrix acc = CMatrix::Zero(rho.rows(), rho.cols());
    for (const CMatrix& c : group) acc += c.adjoint() * dephase(c * rho * c.adjoint()) * c;
    return CMatrix(acc / static_cast<double>(group.size()));
  });
  const auto size = twirled.entries().rows();
  RMatrix closed = RMatrix::Identity(size, size) / (std::ldexp(1.0, k) + 1.0);
  closed(0, 0) = 1.0;
  return (twirled.entries() - closed).cwiseAbs().maxCoeff();
}

}  // namespace xplat
