#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace xplat {

/// What a random substream is used for. The numeric values are part of the
/// replay contract: changing them changes every seeded result.
enum class StreamPurpose : std::uint32_t {
  kShots = 1,
  kShotSplit = 2,
  kEnsemble = 3,
  kBernoulli = 4,
  kCutClifford = 5,
  kCalibration = 6,
  kReadoutNoise = 7,
  kStabilizerSample = 8,
  kStateGeneration = 9,
  kHaar = 10,
  kRepetition = 11,
  kTrainingSplit = 12,
  kVqeRestart = 13,
};

/// Coordinates of an independent substream under one 64-bit master seed.
/// Identical keys always produce identical streams on every platform.
struct StreamKey {
  std::uint32_t platform = 0;
  std::uint32_t part = 0;
  std::uint32_t config = 0;
  std::uint32_t unitary = 0;
  StreamPurpose purpose = StreamPurpose::kShots;
  std::uint64_t extra = 0;
};

/// splitmix64 finalizer; used to mix stream coordinates into a seed.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master_seed, const StreamKey& key);

/// Portable random source. mt19937_64's output sequence is fixed by the
/// standard, and every derived quantity below is computed from raw 64-bit
/// words, so results do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master_seed, const StreamKey& key) : engine_(derive_seed(master_seed, key)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (one value per call, the pair's twin is dropped).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace xplat
