// Seeded random source. All randomness in the library flows through this
// generator so that outputs are reproducible from a single 64-bit seed.
// Generator id: "mt19937_64/box-muller/v1" (std::mt19937_64 engine, uniforms
// from the top 53 bits, Gaussians by the Box-Muller transform with a cached
// spare).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dmf {

inline constexpr const char* kGeneratorId = "mt19937_64/box-muller/v1";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; pairs are consumed in a fixed order.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dmf
