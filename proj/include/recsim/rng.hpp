#pragma once

#include <cstdint>
#include <limits>

namespace recsim {

/// SplitMix64 generator. Cheap to construct, so one engine can be spun up per
/// (purpose, iteration, entity) without measurable overhead in the inner loop.
/// Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix(z);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Independent random streams, one per consumer of randomness.
enum class Purpose : std::uint64_t {
  kInit = 1,
  kChurn = 2,
  kProduction = 3,
  kKDraw = 4,
  kNoise = 5,
  kTheoryInit = 6,
  kSweepSeed = 7,
};

/// Derives a stream from (master_seed, purpose, iteration, entity). Identical
/// inputs give identical streams; scheduling never enters the derivation.
class RngPolicy {
 public:
  explicit RngPolicy(std::uint64_t master_seed) noexcept : master_seed_(master_seed) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }

  SplitMix64 stream(Purpose purpose, std::uint64_t iteration, std::uint64_t entity) const noexcept {
    return SplitMix64(derive_seed(master_seed_, static_cast<std::uint64_t>(purpose), iteration, entity));
  }

  static constexpr std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                             std::uint64_t d) noexcept {
    std::uint64_t h = SplitMix64::mix(a + 0x9E3779B97F4A7C15ULL);
    h = SplitMix64::mix(h ^ (b * 0xD6E8FEB86659FD93ULL));
    h = SplitMix64::mix(h ^ (c + 0x632BE59BD9B4E019ULL));
    h = SplitMix64::mix(h ^ (d * 0x8CB92BA72F3D8DD7ULL + 1));
    return h;
  }

 private:
  std::uint64_t master_seed_;
};

}  // namespace recsim
