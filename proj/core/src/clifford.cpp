#include "xplat/clifford.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <numbers>

#include "xplat/pauli.hpp"
#include "xplat/qsim.hpp"

namespace xplat {

namespace {

using Key = std::vector<long long>;

Key matrix_key(const CMatrix& u) {
  Key key;
  key.reserve(static_cast<std::size_t>(2 * u.size()));
  for (Eigen::Index r = 0; r < u.rows(); ++r)
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      key.push_back(std::llround(u(r, c).real() * 1e6));
      key.push_back(std::llround(u(r, c).imag() * 1e6));
    }
  return key;
}

std::vector<CMatrix> close_group(const std::vector<CMatrix>& generators) {
  const auto d = generators.front().rows();
  std::vector<CMatrix> elements;
  std::map<Key, std::size_t> seen;
  std::deque<CMatrix> queue;
  const CMatrix id = CMatrix::Identity(d, d);
  seen.emplace(matrix_key(id), 0);
  elements.push_back(id);
  queue.push_back(id);
  while (!queue.empty()) {
    const CMatrix g = std::move(queue.front());
    queue.pop_front();
    for (const CMatrix& gen : generators) {
      CMatrix next = normalize_phase(gen * g);
      auto key = matrix_key(next);
      if (seen.emplace(std::move(key), elements.size()).second) {
        elements.push_back(next);
        queue.push_back(std::move(next));
      }
    }
  }
  return elements;
}

Mat2 s_gate() {
  Mat2 m;
  m << 1, 0, 0, cplx(0, 1);
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

}  // namespace

CMatrix normalize_phase(const CMatrix& u) {
  for (Eigen::Index r = 0; r < u.rows(); ++r)
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const cplx x = u(r, c);
      if (std::abs(x) > 1e-9) return u * (std::abs(x) / x);
    }
  return u;
}

bool equal_up_to_phase(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (normalize_phase(a) - normalize_phase(b)).cwiseAbs().maxCoeff() <= tol;
}

const std::vector<Mat2>& single_qubit_clifford_table() {
  static const std::vector<Mat2> table = [] {
    const auto group = close_group({CMatrix(hadamard_matrix()), CMatrix(s_gate())});
    if (group.size() != 24) throw Error("single-qubit Clifford closure did not produce 24 elements");
    std::vector<Mat2> out;
    for (const auto& g : group) out.emplace_back(g);
    return out;
  }();
  return table;
}

int clifford_label(const Mat2& u) {
  const auto& table = single_qubit_clifford_table();
  const CMatrix target = normalize_phase(u);
  for (std::size_t i = 0; i < table.size(); ++i)
    if ((CMatrix(table[i]) - target).cwiseAbs().maxCoeff() < 1e-9) return static_cast<int>(i);
  throw InvalidArgument("matrix is not a single-qubit Clifford");
}

const std::vector<CMatrix>& two_qubit_clifford_group() {
  static const std::vector<CMatrix> group = [] {
    const CMatrix id2 = CMatrix::Identity(2, 2);
    const CMatrix h = hadamard_matrix(), s = s_gate();
    CMatrix cnot = CMatrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    auto g = close_group({kron(h, id2), kron(id2, h), kron(s, id2), kron(id2, s), cnot});
    if (g.size() != 11520) throw Error("two-qubit Clifford closure did not produce 11520 elements");
    return g;
  }();
  return group;
}

bool is_clifford(const CMatrix& u) {
  int k = 0;
  while ((Eigen::Index{1} << k) < u.rows()) ++k;
  if (!is_unitary(u, 1e-9)) return false;
  const double d = static_cast<double>(u.rows());
  for (int q = 0; q < k; ++q)
    for (Pauli p : {Pauli::X, Pauli::Z}) {
      PauliString gen(k);
      gen.set_op(q, p);
      const CMatrix image = u * gen.matrix() * u.adjoint();
      int hits = 0;
      const std::uint64_t count = std::uint64_t{1} << (2 * k);
      for (std::uint64_t i = 0; i < count; ++i) {
        const cplx c = (quaternary_pauli(i, k).matrix() * image).trace() / d;
        if (std::abs(c) < 1e-9) continue;
        if (std::abs(std::abs(c.real()) - 1.0) > 1e-9 || std::abs(c.imag()) > 1e-9) return false;
        ++hits;
      }
      if (hits != 1) return false;
    }
  return true;
}

CMatrix sample_k_clifford(int k, Rng& rng) {
  if (k == 1) {
    const auto& t = single_qubit_clifford_table();
    return t[static_cast<std::size_t>(rng.below(t.size()))];
  }
  if (k == 2) {
    const auto& g = two_qubit_clifford_group();
    return g[static_cast<std::size_t>(rng.below(g.size()))];
  }
  throw InvalidArgument("Clifford sampling supports k in {1, 2}");
}

int identity_label() { return 0; }
int rx_half_pi_label() {
  static const int label = clifford_label(rx_matrix(std::numbers::pi / 2));
  return label;
}
int ry_half_pi_label() {
  static const int label = clifford_label(ry_matrix(std::numbers::pi / 2));
  return label;
}

// ------------------------------------------------------------ cut table

double CutConfigTable::weight_factor() const {
  if (f_hat) return (2.0 - *f_hat) / *f_hat;
  return std::ldexp(1.0, k1 + 1) + 1.0;
}

double CutConfigTable::coefficient(int e) const {
  const auto& entry = entries.at(static_cast<std::size_t>(e));
  return weight_factor() * entry.probability * (entry.z ? -1.0 : 1.0);
}

CutConfigTable cut_config_table(int k1, std::optional<double> f_hat) {
  if (k1 != 1) throw InvalidArgument("cut configuration tables are defined for k1 = 1");
  if (f_hat && !(*f_hat > 0.0 && *f_hat < 1.0)) throw InvalidArgument("f_hat must lie in (0, 1)");
  double p0 = 0.2, p1 = 0.4;
  if (f_hat) {
    p0 = 1.0 / (3.0 * (2.0 - *f_hat));
    p1 = (1.0 - *f_hat) / (2.0 - *f_hat);
  }
  CutConfigTable table;
  table.k1 = k1;
  table.f_hat = f_hat;
  table.entries = {
      {0, "I", Mat2::Identity(), p0},
      {0, "Ry(pi/2)", ry_matrix(std::numbers::pi / 2), p0},
      {0, "Rx(pi/2)", rx_matrix(std::numbers::pi / 2), p0},
      {1, "I", Mat2::Identity(), p1},
  };
  return table;
}

// ------------------------------------------------------------ ensembles

std::string to_string(EnsembleMode mode) { return mode == EnsembleMode::kRandom ? "random" : "exhaustive"; }

EnsembleMode ensemble_mode_from_string(const std::string& text) {
  if (text == "random") return EnsembleMode::kRandom;
  if (text == "exhaustive") return EnsembleMode::kExhaustive;
  throw ConfigError("unknown ensemble mode '" + text + "'");
}

UnitaryEnsemble::UnitaryEnsemble(EnsembleSpec spec) : spec_(std::move(spec)) {
  if (spec_.part_sizes.empty()) throw InvalidArgument("ensemble needs at least one part");
  if (spec_.mode == EnsembleMode::kRandom && spec_.num_settings < 1)
    throw InvalidArgument("ensemble needs N >= 1");
  const int basis[3] = {identity_label(), rx_half_pi_label(), ry_half_pi_label()};
  for (std::size_t part = 0; part < spec_.part_sizes.size(); ++part) {
    const int k = spec_.part_sizes[part];
    if (k < 0 || k > kMaxQubits) throw InvalidArgument("ensemble part size out of range");
    std::vector<std::vector<int>> settings;
    if (spec_.mode == EnsembleMode::kExhaustive) {
      int count = 1;
      for (int q = 0; q < k; ++q) count *= 3;
      for (int t = 0; t < count; ++t) {
        std::vector<int> labels(static_cast<std::size_t>(k));
        int rest = t;
        for (int q = k - 1; q >= 0; --q) {
          labels[static_cast<std::size_t>(q)] = basis[rest % 3];
          rest /= 3;
        }
        settings.push_back(std::move(labels));
      }
    } else {
      for (int t = 0; t < spec_.num_settings; ++t) {
        StreamKey key;
        key.part = static_cast<std::uint32_t>(part);
        key.unitary = static_cast<std::uint32_t>(t);
        key.purpose = StreamPurpose::kEnsemble;
        Rng rng(spec_.seed, key);
        std::vector<int> labels(static_cast<std::size_t>(k));
        for (int& l : labels) l = static_cast<int>(rng.below(24));
        settings.push_back(std::move(labels));
      }
    }
    labels_.push_back(std::move(settings));
  }
}

int UnitaryEnsemble::num_settings(int part) const {
  return static_cast<int>(labels_.at(static_cast<std::size_t>(part)).size());
}

const std::vector<int>& UnitaryEnsemble::labels(int part, int t) const {
  return labels_.at(static_cast<std::size_t>(part)).at(static_cast<std::size_t>(t));
}

std::vector<Mat2> UnitaryEnsemble::matrices(int part, int t) const {
  const auto& table = single_qubit_clifford_table();
  std::vector<Mat2> out;
  for (int l : labels(part, t)) out.push_back(table[static_cast<std::size_t>(l)]);
  return out;
}

std::string UnitaryEnsemble::digest() const {
  std::uint64_t h = mix64(spec_.seed ^ (spec_.mode == EnsembleMode::kRandom ? 0x11 : 0x22));
  for (int k : spec_.part_sizes) h = mix64(h ^ static_cast<std::uint64_t>(k));
  for (const auto& part : labels_) {
    h = mix64(h ^ 0xa5a5a5a5ULL ^ part.size());
    for (const auto& setting : part)
      for (int l : setting) h = mix64(h ^ static_cast<std::uint64_t>(l + 1));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

UnitaryEnsemble shared_ensemble(const std::vector<int>& part_sizes, int num_settings, std::uint64_t seed,
                                EnsembleMode mode) {
  return UnitaryEnsemble(EnsembleSpec{part_sizes, num_settings, seed, mode});
}

// ------------------------------------------------------------ MUBs

namespace {

// Pauli as (x | z) bit vectors packed into 2n bits; x in the high half.
int symplectic(unsigned a, unsigned b, int n) {
  const unsigned mask = (1u << n) - 1;
  const unsigned ax = a >> n, az = a & mask, bx = b >> n, bz = b & mask;
  return (std::popcount(ax & bz) + std::popcount(az & bx)) & 1;
}

PauliString pauli_from_bits(unsigned v, int n) {
  PauliString p(n);
  for (int q = 0; q < n; ++q) {
    const bool x = (v >> (2 * n - 1 - q)) & 1;
    const bool z = (v >> (n - 1 - q)) & 1;
    p.set_op(q, x ? (z ? Pauli::Y : Pauli::X) : (z ? Pauli::Z : Pauli::I));
  }
  return p;
}

std::vector<unsigned> span_of(const std::vector<unsigned>& basis) {
  std::vector<unsigned> out = {0};
  for (unsigned b : basis) {
    const std::size_t size = out.size();
    for (std::size_t i = 0; i < size; ++i) out.push_back(out[i] ^ b);
  }
  return out;
}

// Exact cover of the nonzero symplectic vectors by 2^n + 1 Lagrangian subspaces.
bool find_spread(int n, std::vector<bool>& used, std::vector<std::vector<unsigned>>& spread) {
  const unsigned total = 1u << (2 * n);
  unsigned first = 0;
  for (unsigned v = 1; v < total; ++v)
    if (!used[v]) {
      first = v;
      break;
    }
  if (first == 0) return true;
  std::vector<unsigned> basis = {first};
  std::function<bool()> extend = [&]() -> bool {
    if (static_cast<int>(basis.size()) == n) {
      const auto elems = span_of(basis);
      for (unsigned e : elems) used[e] = e != 0 ? true : used[e];
      spread.push_back(basis);
      if (find_spread(n, used, spread)) return true;
      spread.pop_back();
      for (unsigned e : elems)
        if (e != 0) used[e] = false;
      return false;
    }
    const auto current = span_of(basis);
    for (unsigned v = basis.back() + 1; v < total; ++v) {
      if (used[v]) continue;
      bool ok = true;
      for (unsigned b : basis) ok = ok && !symplectic(v, b, n);
      if (!ok) continue;
      bool fresh = true;
      for (unsigned e : current) {
        const unsigned w = e ^ v;
        if (w == 0 || used[w] || std::find(current.begin(), current.end(), w) != current.end()) {
          fresh = false;
          break;
        }
      }
      if (!fresh) continue;
      basis.push_back(v);
      if (extend()) return true;
      basis.pop_back();
    }
    return false;
  };
  return extend();
}

CMatrix basis_unitary(const std::vector<unsigned>& generators, int n) {
  const auto d = static_cast<Eigen::Index>(dim_of(n));
  CMatrix e(d, d);
  for (Eigen::Index s = 0; s < d; ++s) {
    CMatrix proj = CMatrix::Identity(d, d);
    for (int i = 0; i < n; ++i) {
      const double sign = ((s >> (n - 1 - i)) & 1) ? -1.0 : 1.0;
      proj = proj * (CMatrix::Identity(d, d) + sign * pauli_from_bits(generators[static_cast<std::size_t>(i)], n).matrix()) * 0.5;
    }
    Eigen::Index best = 0;
    proj.colwise().norm().maxCoeff(&best);
    e.col(s) = proj.col(best).normalized();
  }
  return e.adjoint();
}

}  // namespace

const std::vector<CMatrix>& mub_unitaries(int n) {
  static std::map<int, std::vector<CMatrix>> cache;
  if (n < 1 || n > 3) throw InvalidArgument("mutually unbiased bases are provided for n <= 3");
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<bool> used(1u << (2 * n), false);
  std::vector<std::vector<unsigned>> spread;
  if (!find_spread(n, used, spread)) throw Error("no symplectic spread found");
  std::vector<CMatrix> out;
  for (const auto& gens : spread) out.push_back(basis_unitary(gens, n));
  return cache.emplace(n, std::move(out)).first->second;
}

std::string to_string(GlobalEnsembleKind kind) {
  switch (kind) {
    case GlobalEnsembleKind::kMub: return "mub";
    case GlobalEnsembleKind::kClifford: return "clifford";
    case GlobalEnsembleKind::kHaar: return "haar";
  }
  return "unknown";
}

std::vector<CMatrix> global_ensemble(int n, int num_settings, GlobalEnsembleKind kind, std::uint64_t seed) {
  if (num_settings < 1) throw InvalidArgument("global ensemble needs N >= 1");
  if (n > 4) throw InvalidArgument("global unitaries are limited to n <= 4");
  std::vector<CMatrix> out;
  for (int t = 0; t < num_settings; ++t) {
    StreamKey key;
    key.unitary = static_cast<std::uint32_t>(t);
    key.purpose = StreamPurpose::kHaar;
    Rng rng(seed, key);
    switch (kind) {
      case GlobalEnsembleKind::kMub: {
        const auto& bases = mub_unitaries(n);
        out.push_back(bases[static_cast<std::size_t>(rng.below(bases.size()))]);
        break;
      }
      case GlobalEnsembleKind::kClifford:
        if (n > 2) throw InvalidArgument("global Clifford sampling supports n <= 2");
        out.push_back(sample_k_clifford(n, rng));
        break;
      case GlobalEnsembleKind::kHaar: out.push_back(haar_unitary(static_cast<Eigen::Index>(dim_of(n)), rng)); break;
    }
  }
  return out;
}

}  // namespace xplat
