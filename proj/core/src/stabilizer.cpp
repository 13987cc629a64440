#include "xplat/stabilizer.hpp"

#include <numbers>
#include <set>

#include "xplat/qsim.hpp"

namespace xplat {

StabilizerGroup stabilizer_group(std::vector<PauliString> generators) {
  if (generators.empty()) throw InvalidArgument("stabilizer group needs generators");
  const int n = generators.front().size();
  for (const auto& g : generators) {
    if (g.size() != n) throw DimensionError("generator lengths differ");
    g.sign();  // rejects imaginary phases
  }
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (!generators[i].commutes_with(generators[j])) throw InvalidArgument("generators do not commute");
  if (generators.size() > 20) throw InvalidArgument("too many generators");

  StabilizerGroup group;
  group.n = n;
  const std::size_t count = std::size_t{1} << generators.size();
  std::set<std::string> letters;
  for (std::size_t i = 0; i < count; ++i) {
    PauliString e(n);
    for (std::size_t j = 0; j < generators.size(); ++j)
      if ((i >> j) & 1) e = e * generators[j];
    if (e.is_identity() && e.phase() != 0) throw InvalidArgument("generators produce -I");
    if (!letters.insert(e.letters()).second) throw InvalidArgument("generators are not independent");
    group.elements.push_back(std::move(e));
  }
  group.generators = std::move(generators);
  return group;
}

StabilizerGroup ghz_stabilizers(int n) {
  if (n < 2) throw InvalidArgument("GHZ stabilizers need n >= 2");
  std::vector<PauliString> gens;
  PauliString all_x(n);
  for (int q = 0; q < n; ++q) all_x.set_op(q, Pauli::X);
  gens.push_back(all_x);
  for (int q = 1; q < n; ++q) {
    PauliString zz(n);
    zz.set_op(q - 1, Pauli::Z);
    zz.set_op(q, Pauli::Z);
    gens.push_back(zz);
  }
  return stabilizer_group(std::move(gens));
}

std::vector<Mat2> stabilizer_setting(const PauliString& p) {
  std::vector<Mat2> setting;
  for (Pauli op : p.ops()) {
    switch (op) {
      case Pauli::X: setting.push_back(ry_matrix(-std::numbers::pi / 2)); break;
      case Pauli::Y: setting.push_back(rx_matrix(std::numbers::pi / 2)); break;
      default: setting.push_back(Mat2::Identity()); break;
    }
  }
  return setting;
}

}  // namespace xplat
