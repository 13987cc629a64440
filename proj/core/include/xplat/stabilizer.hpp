#pragma once

#include <vector>

#include "xplat/pauli.hpp"
#include "xplat/types.hpp"

namespace xplat {

struct StabilizerGroup {
  int n = 0;
  std::vector<PauliString> generators;
  /// Element i is the ordered product of the generators whose bit is set in i
  /// (bit j of i selects generator j), so element 0 is the identity.
  std::vector<PauliString> elements;
};

/// Closes a set of independent, commuting, Hermitian generators.
StabilizerGroup stabilizer_group(std::vector<PauliString> generators);

/// Generators X...X and Z_{j-1} Z_j for j = 2..n.
StabilizerGroup ghz_stabilizers(int n);

/// Per-qubit rotations W with W^dagger Z W = P on every non-identity site:
/// X -> Ry(-pi/2), Y -> Rx(pi/2), Z and I -> identity. The sign of P is not
/// encoded; callers apply it.
std::vector<Mat2> stabilizer_setting(const PauliString& p);

}  // namespace xplat
