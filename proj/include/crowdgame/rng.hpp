// Seeded random streams with O(1) independent forking.
//
// All randomness in the toolkit flows through rng::Stream. A stream is
// identified by a 64-bit key; fork(lane) derives a child key from the parent
// key alone, never from how many draws were consumed. Trial substreams are
// therefore stable under parallel scheduling, and adding more trials to a run
// never perturbs the draws of earlier trials.

#pragma once

#include <cstdint>
#include <random>

namespace crowdgame::rng {

// splitmix64 finalizer; used only for key derivation.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t lane) {
  return mix64(parent ^ mix64(lane + 0x632be59bd9b4e019ULL));
}

// Named lanes hung off a master seed. Each subsystem draws from its own lane
// so that, e.g., raising the trial count never shifts assignment construction.
enum class Lane : std::uint64_t {
  World = 1,
  Strategies = 2,
  Mechanism = 3,
  Dynamics = 4,
};

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key), engine_(mix64(key)) {}

  // Independent child stream. Pure: depends only on this stream's key.
  Stream fork(std::uint64_t lane) const { return Stream(derive_key(key_, lane)); }
  Stream fork(Lane lane) const { return fork(static_cast<std::uint64_t>(lane)); }

  std::uint64_t key() const { return key_; }

  std::uint64_t bits() { return engine_(); }

  // Canonical double in [0,1), 53 random bits. Avoids std::*_distribution,
  // whose output is implementation-defined, so sequences are portable.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n), n >= 1, by rejection.
  int uniform_int(int n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (~std::uint64_t{0} / un) * un;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace crowdgame::rng
