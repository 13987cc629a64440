#include "xplat/liouville.hpp"

#include <cmath>
#include <vector>

#include "xplat/pauli.hpp"

namespace xplat {

namespace {

int qubits_of(Eigen::Index dim) {
  int k = 0;
  while ((Eigen::Index{1} << k) < dim) ++k;
  if ((Eigen::Index{1} << k) != dim) throw DimensionError("operator dimension is not a power of two");
  return k;
}

const std::vector<CMatrix>& pauli_basis(int k) {
  static std::vector<std::vector<CMatrix>> cache(3);
  if (k < 1 || k > 2) throw InvalidArgument("Liouville utilities support k in {1, 2}");
  auto& basis = cache[static_cast<std::size_t>(k)];
  if (basis.empty()) {
    const std::uint64_t count = std::uint64_t{1} << (2 * k);
    for (std::uint64_t i = 0; i < count; ++i) basis.push_back(quaternary_pauli(i, k).matrix());
  }
  return basis;
}

}  // namespace

RVector to_liouville(const CMatrix& op) {
  const int k = qubits_of(op.rows());
  const auto& basis = pauli_basis(k);
  const double norm = std::sqrt(static_cast<double>(op.rows()));
  RVector v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = (basis[i] * op).trace().real() / norm;
  return v;
}

CMatrix from_liouville(const RVector& v) {
  int k = 0;
  while ((Eigen::Index{1} << (2 * k)) < v.size()) ++k;
  const auto& basis = pauli_basis(k);
  const auto d = Eigen::Index{1} << k;
  CMatrix op = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < basis.size(); ++i) op += v(static_cast<Eigen::Index>(i)) * basis[i];
  return op / std::sqrt(static_cast<double>(d));
}

ChannelMatrix::ChannelMatrix(int k, RMatrix entries) : k_(k), m_(std::move(entries)) {
  const auto n = Eigen::Index{1} << (2 * k);
  if (m_.rows() != n || m_.cols() != n) throw DimensionError("channel matrix must be 4^k x 4^k");
}

ChannelMatrix ChannelMatrix::identity(int k) {
  const auto n = Eigen::Index{1} << (2 * k);
  return ChannelMatrix(k, RMatrix::Identity(n, n));
}

ChannelMatrix ChannelMatrix::from_map(int k, const std::function<CMatrix(const CMatrix&)>& channel) {
  const auto& basis = pauli_basis(k);
  const double d = static_cast<double>(Eigen::Index{1} << k);
  const auto n = static_cast<Eigen::Index>(basis.size());
  RMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const CMatrix out = channel(basis[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = (basis[static_cast<std::size_t>(i)] * out).trace().real() / d;
  }
  return ChannelMatrix(k, std::move(m));
}

ChannelMatrix ChannelMatrix::from_unitary(const CMatrix& u) {
  const int k = qubits_of(u.rows());
  return from_map(k, [&](const CMatrix& x) -> CMatrix { return u * x * u.adjoint(); });
}

CMatrix ChannelMatrix::apply(const CMatrix& rho) const {
  if (rho.rows() != (Eigen::Index{1} << k_)) throw DimensionError("operator size does not match channel");
  return from_liouville(m_ * to_liouville(rho));
}

bool ChannelMatrix::trace_preserving(double tol) const {
  RVector first = RVector::Zero(m_.cols());
  first(0) = 1.0;
  return (m_.row(0).transpose() - first).cwiseAbs().maxCoeff() <= tol;
}

ChannelMatrix operator*(const ChannelMatrix& a, const ChannelMatrix& b) {
  if (a.k_ != b.k_) throw DimensionError("channel size mismatch");
  return ChannelMatrix(a.k_, a.m_ * b.m_);
}

ChannelMatrix operator+(const ChannelMatrix& a, const ChannelMatrix& b) {
  if (a.k_ != b.k_) throw DimensionError("channel size mismatch");
  return ChannelMatrix(a.k_, a.m_ + b.m_);
}

ChannelMatrix operator-(const ChannelMatrix& a, const ChannelMatrix& b) {
  if (a.k_ != b.k_) throw DimensionError("channel size mismatch");
  return ChannelMatrix(a.k_, a.m_ - b.m_);
}

ChannelMatrix operator*(double s, const ChannelMatrix& a) { return ChannelMatrix(a.k_, s * a.m_); }

double ChannelMatrix::max_abs_diff(const ChannelMatrix& other) const {
  if (k_ != other.k_) throw DimensionError("channel size mismatch");
  return (m_ - other.m_).cwiseAbs().maxCoeff();
}

ChannelMatrix identity_projector(int k) {
  const auto n = Eigen::Index{1} << (2 * k);
  RMatrix m = RMatrix::Zero(n, n);
  m(0, 0) = 1.0;
  return ChannelMatrix(k, std::move(m));
}

ChannelMatrix traceless_projector(int k) { return ChannelMatrix::identity(k) - identity_projector(k); }

ChannelMatrix measure_prepare(int k) {
  return ChannelMatrix::from_map(k, [](const CMatrix& x) -> CMatrix {
    CMatrix out = CMatrix::Zero(x.rows(), x.cols());
    out.diagonal() = x.diagonal();
    return out;
  });
}

}  // namespace xplat
