#pragma once

#include <cstdint>
#include <random>

#include "liecast/lie_core.hpp"

namespace liecast {

// Deterministic random source. The mt19937_64 stream is pinned by the
// standard; the uniform/gaussian transforms are hand-rolled so values do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller; one value per call, pair cached.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Coordinates uniform in [-1,1] over the descriptor basis, rescaled to a
// uniform Frobenius norm in (0, max_norm].
AlgebraElement random_algebra_element(const AlgebraDescriptor& d, Rng& rng,
                                      double max_norm);

// exp of a random algebra element of norm <= pi.
GroupElement random_group_element(const AlgebraDescriptor& d, Rng& rng);

}  // namespace liecast
