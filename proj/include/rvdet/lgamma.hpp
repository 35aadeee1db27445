#pragma once

// Complex log-gamma via the Lanczos approximation (g = 7, 9 coefficients),
// with the reflection formula for Re(z) < 0.5. Relative accuracy of the
// exponentiated value is ~1e-14 on Re(z) >= 0.5.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace rvdet {

inline std::complex<double> log_gamma(std::complex<double> z) {
  using cd = std::complex<double>;
  static const double g = 7.0;
  static const double coef[9] = {0.99999999999980993,
                                 676.5203681218851,
                                 -1259.1392167224028,
                                 771.32342877765313,
                                 -176.61502916214059,
                                 12.507343278686905,
                                 -0.13857109526572012,
                                 9.9843695780195716e-6,
                                 1.5056327351493116e-7};
  static const double half_log_two_pi = 0.9189385332046727;
  if (z.real() < 0.5) {
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    // log(sin(pi z)) is formed without evaluating the (overflowing)
    // sine itself: sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}).
    if (z.imag() == 0.0 && z.real() == std::floor(z.real()))
      throw std::invalid_argument("log_gamma: pole at nonpositive integer");
    cd w = (z.imag() >= 0.0) ? z : std::conj(z);
    cd log_sin = cd(std::log(0.5), M_PI_2) - cd(0.0, M_PI) * w +
                 std::log(1.0 - std::exp(cd(0.0, 2.0 * M_PI) * w));
    if (z.imag() < 0.0) log_sin = std::conj(log_sin);
    return std::log(M_PI) - log_sin - log_gamma(1.0 - z);
  }
  cd zm1 = z - 1.0;
  cd acc = coef[0];
  for (int i = 1; i < 9; ++i) acc += coef[i] / (zm1 + double(i));
  cd t = zm1 + g + 0.5;
  return half_log_two_pi + (zm1 + 0.5) * std::log(t) - t + std::log(acc);
}

inline std::complex<double> cgamma(std::complex<double> z) {
  return std::exp(log_gamma(z));
}

}  // namespace rvdet
