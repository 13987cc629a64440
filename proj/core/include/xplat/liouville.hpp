#pragma once

// Pauli-transfer (Liouville) representation of k-qubit channels.
// Basis vector i is the normalized Pauli |P_i>> = P_i / sqrt(2^k), with P_i
// ordered as quaternary_pauli(i, k).

#include <functional>

#include "xplat/types.hpp"

namespace xplat {

/// Coefficients of a Hermitian operator in the normalized Pauli basis.
RVector to_liouville(const CMatrix& op);
CMatrix from_liouville(const RVector& v);

class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  ChannelMatrix(int k, RMatrix entries);

  static ChannelMatrix identity(int k);
  /// Entries tr(P_i E(P_j)) / 2^k of an arbitrary Hermiticity-preserving map.
  static ChannelMatrix from_map(int k, const std::function<CMatrix(const CMatrix&)>& channel);
  static ChannelMatrix from_unitary(const CMatrix& u);

  int k() const { return k_; }
  const RMatrix& entries() const { return m_; }

  CMatrix apply(const CMatrix& rho) const;
  bool trace_preserving(double tol = kExactTol) const;

  /// Composition: (a * b) applies b first.
  friend ChannelMatrix operator*(const ChannelMatrix& a, const ChannelMatrix& b);
  friend ChannelMatrix operator+(const ChannelMatrix& a, const ChannelMatrix& b);
  friend ChannelMatrix operator-(const ChannelMatrix& a, const ChannelMatrix& b);
  friend ChannelMatrix operator*(double s, const ChannelMatrix& a);

  double max_abs_diff(const ChannelMatrix& other) const;

 private:
  int k_ = 0;
  RMatrix m_;
};

/// |I>><<I|, the trace-and-replace-by-I/2^k channel.
ChannelMatrix identity_projector(int k);
/// Projector onto the traceless sector.
ChannelMatrix traceless_projector(int k);
/// Computational-basis measure-and-prepare channel.
ChannelMatrix measure_prepare(int k);

}  // namespace xplat
