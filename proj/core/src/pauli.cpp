#include "xplat/pauli.hpp"

#include <array>

namespace xplat {

namespace {

// Single-site product table: kProd[a][b] = (result, phase exponent of i).
struct SiteProduct {
  Pauli result;
  int phase;
};

constexpr std::array<std::array<SiteProduct, 4>, 4> kProd = {{
    {{{Pauli::I, 0}, {Pauli::X, 0}, {Pauli::Y, 0}, {Pauli::Z, 0}}},
    {{{Pauli::X, 0}, {Pauli::I, 0}, {Pauli::Z, 1}, {Pauli::Y, 3}}},
    {{{Pauli::Y, 0}, {Pauli::Z, 3}, {Pauli::I, 0}, {Pauli::X, 1}}},
    {{{Pauli::Z, 0}, {Pauli::Y, 1}, {Pauli::X, 3}, {Pauli::I, 0}}},
}};

}  // namespace

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Mat2 pauli_matrix(Pauli p) {
  Mat2 m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    if (text[pos] == '-') phase = 2;
    ++pos;
  }
  if (pos < text.size() && text[pos] == 'i') {
    phase = (phase + 1) & 3;
    ++pos;
  }
  std::vector<Pauli> ops;
  for (; pos < text.size(); ++pos) {
    switch (text[pos]) {
      case 'I': ops.push_back(Pauli::I); break;
      case 'X': ops.push_back(Pauli::X); break;
      case 'Y': ops.push_back(Pauli::Y); break;
      case 'Z': ops.push_back(Pauli::Z); break;
      default:
        throw InvalidArgument("malformed Pauli string '" + std::string(text) + "'");
    }
  }
  if (ops.empty()) throw InvalidArgument("empty Pauli string");
  return PauliString(std::move(ops), phase);
}

int PauliString::sign() const {
  if (phase_ == 0) return 1;
  if (phase_ == 2) return -1;
  throw InvalidArgument("Pauli string " + to_string() + " is not Hermitian");
}

int PauliString::weight() const {
  int w = 0;
  for (Pauli p : ops_) w += p != Pauli::I;
  return w;
}

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  for (int q = 0; q < size(); ++q)
    if (ops_[static_cast<std::size_t>(q)] != Pauli::I) s.push_back(q);
  return s;
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.size() != size()) throw DimensionError("Pauli length mismatch");
  int anti = 0;
  for (std::size_t q = 0; q < ops_.size(); ++q) {
    const Pauli a = ops_[q], b = other.ops_[q];
    anti += (a != Pauli::I && b != Pauli::I && a != b);
  }
  return anti % 2 == 0;
}

bool PauliString::qubitwise_commutes_with(const PauliString& other) const {
  if (other.size() != size()) throw DimensionError("Pauli length mismatch");
  for (std::size_t q = 0; q < ops_.size(); ++q) {
    const Pauli a = ops_[q], b = other.ops_[q];
    if (a != Pauli::I && b != Pauli::I && a != b) return false;
  }
  return true;
}

PauliString PauliString::operator*(const PauliString& rhs) const {
  if (rhs.size() != size()) throw DimensionError("Pauli length mismatch");
  std::vector<Pauli> ops(ops_.size());
  int phase = phase_ + rhs.phase_;
  for (std::size_t q = 0; q < ops_.size(); ++q) {
    const auto& p = kProd[static_cast<int>(ops_[q])][static_cast<int>(rhs.ops_[q])];
    ops[q] = p.result;
    phase += p.phase;
  }
  return PauliString(std::move(ops), phase);
}

CMatrix PauliString::matrix() const {
  CMatrix m = CMatrix::Identity(1, 1);
  for (Pauli p : ops_) {
    const Mat2 site = pauli_matrix(p);
    CMatrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        next.block(2 * r, 2 * c, 2, 2) = m(r, c) * site;
    m = std::move(next);
  }
  static const std::array<cplx, 4> kPhase = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return m * kPhase[static_cast<std::size_t>(phase_)];
}

std::string PauliString::letters() const {
  std::string s;
  s.reserve(ops_.size());
  for (Pauli p : ops_) s.push_back(pauli_char(p));
  return s;
}

std::string PauliString::to_string() const {
  static const char* kPrefix[] = {"+", "+i", "-", "-i"};
  return kPrefix[phase_] + letters();
}

PauliString quaternary_pauli(std::uint64_t index, int n) {
  if (n < 1 || n > kMaxQubits) throw InvalidArgument("quaternary_pauli: bad qubit count");
  const std::uint64_t limit = std::uint64_t{1} << (2 * n);
  if (index >= limit) throw InvalidArgument("quaternary_pauli: index out of range");
  PauliString p(n);
  for (int q = n - 1; q >= 0; --q) {
    p.set_op(q, static_cast<Pauli>(index & 3));
    index >>= 2;
  }
  return p;
}

}  // namespace xplat
