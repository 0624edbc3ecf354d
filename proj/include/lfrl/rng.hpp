#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lfrl {

// mt19937_64 with distribution helpers that do not depend on the standard
// library's (implementation-defined) distribution algorithms, so a seed
// reproduces the same sequence on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Independent stream derived from a run seed and a stream name.
  static Rng stream(std::uint64_t seed, std::string_view name);

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n). n must be > 0.
  std::size_t index(std::size_t n);

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

// The named streams of one run. Drawing from one never perturbs another.
struct RngStreams {
  Rng direction;
  Rng start;
  Rng exploration;
  Rng noise;

  explicit RngStreams(std::uint64_t seed)
      : direction(Rng::stream(seed, "direction")),
        start(Rng::stream(seed, "start")),
        exploration(Rng::stream(seed, "exploration")),
        noise(Rng::stream(seed, "noise")) {}
};

}  // namespace lfrl
