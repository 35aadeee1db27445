#pragma once

// Deterministic random layer. mt19937_64 plus hand-rolled conversions, so
// streams are identical across standard library implementations. Bulk
// sampling is chunked; chunk c of a run with seed s uses engine seed s + c,
// which makes results independent of how chunks are scheduled.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace rvdet {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform on (0,1): 53-bit mantissa, zero excluded
  double uniform() {
    double u = (eng_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  // standard normal, Box-Muller with cached spare
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  // Poisson by Knuth's product method; fine for the desk-scale means used
  // here (guarded against exp underflow).
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0) || mean > 700.0)
      throw std::invalid_argument("Rng::poisson: mean out of range");
    double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t k = 0;
    while (true) {
      prod *= uniform();
      if (prod <= limit) return k;
      ++k;
    }
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr std::uint64_t kChunkSize = 1u << 16;

inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  return seed + chunk;
}

}  // namespace rvdet
