#ifndef RETINT_FFT_HPP
#define RETINT_FFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "retint/error.hpp"

namespace retint {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

/// In-place iterative radix-2 FFT. `inverse` applies the 1/N factor.
inline void fft(std::span<std::complex<double>> a, bool inverse = false) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n))
    throw ParameterError("FFT length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1)
      j ^= bit;
    j ^= bit;
    if (i < j)
      std::swap(a[i], a[j]);
  }

  std::vector<std::complex<double>> twiddle(n / 2);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n / 2; ++j)
    twiddle[j] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(j) /
                                     static_cast<double>(n));

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + half] * twiddle[j * stride];
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto &x : a)
      x *= inv;
  }
}

} // namespace retint

#endif // RETINT_FFT_HPP
