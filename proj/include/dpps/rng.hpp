#pragma once

#include "dpps/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace dpps {

// Deterministic normal generator. std::normal_distribution is implementation
// defined, so Box-Muller over raw mt19937_64 words is used instead; the whole
// pipeline is bit-reproducible for a given seed and call sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0,1]; never returns 0 so log() below is safe.
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec normal_vec(Index n) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Purpose tags for derived streams. Keeping every consumer on its own
// substream means e.g. drawing more candidates at one timestep cannot perturb
// the noise used anywhere else.
enum class Stream : std::uint64_t {
  Init = 1,         // x_T initialization noise
  Candidates = 2,   // per-timestep candidate draws (index = t)
  GroundTruth = 10, // preset x0 sample
  Measurement = 11, // measurement noise
  Mask = 12,        // random mask draw
  Trial = 13,       // per-trial draws in the variance experiment
  Fixture = 14,     // frozen variance-experiment fixture state
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

inline std::uint64_t substream_seed(std::uint64_t seed, Stream purpose,
                                    std::uint64_t index = 0) {
  std::uint64_t s = detail::splitmix64(seed);
  s = detail::splitmix64(s ^ static_cast<std::uint64_t>(purpose));
  return detail::splitmix64(s ^ index);
}

inline Rng substream(std::uint64_t seed, Stream purpose,
                     std::uint64_t index = 0) {
  return Rng(substream_seed(seed, purpose, index));
}

}  // namespace dpps
