#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xplat/types.hpp"

namespace xplat {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);

/// Multi-qubit Pauli operator with a phase i^phase. Position 0 is qubit 1,
/// the most significant bit of basis-state indices.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n) : ops_(static_cast<std::size_t>(n), Pauli::I) {}
  PauliString(std::vector<Pauli> ops, int phase) : ops_(std::move(ops)), phase_(phase & 3) {}

  /// Parses "XIZ", "+XX", "-YY", "iZ", "-iX". Throws InvalidArgument on anything else.
  static PauliString parse(std::string_view text);

  int size() const { return static_cast<int>(ops_.size()); }
  Pauli op(int q) const { return ops_.at(static_cast<std::size_t>(q)); }
  void set_op(int q, Pauli p) { ops_.at(static_cast<std::size_t>(q)) = p; }
  const std::vector<Pauli>& ops() const { return ops_; }

  int phase() const { return phase_; }
  /// +1/-1 for Hermitian strings; throws for imaginary phases.
  int sign() const;
  void set_sign(int s) { phase_ = s < 0 ? 2 : 0; }

  int weight() const;
  bool is_identity() const { return weight() == 0; }
  std::vector<int> support() const;

  bool commutes_with(const PauliString& other) const;
  /// Qubit-wise commutation: every site's factors commute.
  bool qubitwise_commutes_with(const PauliString& other) const;

  PauliString operator*(const PauliString& rhs) const;
  bool operator==(const PauliString& rhs) const = default;

  /// Dense 2^n x 2^n matrix including the phase.
  CMatrix matrix() const;

  /// Signed text form, e.g. "+XXZ" or "-YY".
  std::string to_string() const;
  /// Unsigned operator letters only.
  std::string letters() const;

 private:
  std::vector<Pauli> ops_;
  int phase_ = 0;
};

Mat2 pauli_matrix(Pauli p);

/// Base-4 digits of index (most significant digit = qubit 1) mapped
/// 0,1,2,3 -> I,X,Y,Z.
PauliString quaternary_pauli(std::uint64_t index, int n);

}  // namespace xplat
