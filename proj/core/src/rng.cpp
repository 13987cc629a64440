#include "xplat/rng.hpp"

#include <cmath>
#include <numbers>

namespace xplat {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, const StreamKey& key) {
  std::uint64_t h = mix64(master_seed);
  const std::uint64_t fields[] = {key.platform, key.part, key.config, key.unitary,
                                  static_cast<std::uint64_t>(key.purpose), key.extra};
  for (std::uint64_t f : fields) {
    h = mix64(h ^ mix64(f + 0x632be59bd9b4e019ULL));
  }
  return h;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace xplat
