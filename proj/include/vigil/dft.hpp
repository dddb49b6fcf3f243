#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vigil/common.hpp"

namespace vigil {

// One-sided power spectrum: power[k] = |X_k|^2 for k = 0 .. floor(N/2).
struct PowerSpectrum {
  double bin_hz = 0.0;
  std::vector<double> power;
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey. Twiddles come from a per-call table with one
// sincos per entry, which keeps bin errors near machine precision.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::complex<double>> twiddle(n / 2);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double angle = sign * 2.0 * std::numbers::pi *
                         static_cast<double>(j) / static_cast<double>(n);
    twiddle[j] = {std::cos(angle), std::sin(angle)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t block = 0; block < n; block += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[block + k];
        const std::complex<double> v = a[block + k + len / 2] * twiddle[k * stride];
        a[block + k] = u + v;
        a[block + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& value : a) value *= scale;
  }
}

// Bluestein chirp-z transform: exact DFT for arbitrary N as one cyclic
// convolution of power-of-two size. Chirp angles are reduced with exact
// integer arithmetic (m^2 mod 2N) before the sincos, so large indices do not
// lose precision.
inline std::vector<std::complex<double>> dft_bluestein(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t m = 0; m < n; ++m) {
    const std::uint64_t reduced =
        (static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m)) %
        (2 * static_cast<std::uint64_t>(n));
    const double angle = -std::numbers::pi * static_cast<double>(reduced) /
                         static_cast<double>(n);
    chirp[m] = {std::cos(angle), std::sin(angle)};
  }

  const std::size_t padded = next_pow2(2 * n - 1);
  std::vector<std::complex<double>> a(padded), b(padded);
  for (std::size_t m = 0; m < n; ++m) a[m] = x[m] * chirp[m];
  b[0] = std::conj(chirp[0]);
  for (std::size_t m = 1; m < n; ++m) {
    b[m] = std::conj(chirp[m]);
    b[padded - m] = b[m];
  }

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t i = 0; i < padded; ++i) a[i] *= b[i];
  fft_pow2(a, true);

  std::vector<std::complex<double>> result(n);
  for (std::size_t k = 0; k < n; ++k) result[k] = chirp[k] * a[k];
  return result;
}

}  // namespace detail

// Power spectrum of a real signal. Fast path (radix-2 or Bluestein) computes
// the same quantity as the O(N^2) definition; tests pin the agreement at
// relative 1e-9.
inline PowerSpectrum dft_power(std::span<const double> samples, double sample_rate_hz) {
  require_arg(!samples.empty(), "dft_power: empty input");
  require_arg(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0,
              "dft_power: sample_rate_hz must be positive and finite");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw std::invalid_argument("dft_power: non-finite sample at index " +
                                  std::to_string(i));
    }
  }

  const std::size_t n = samples.size();
  std::vector<std::complex<double>> spectrum;
  if ((n & (n - 1)) == 0) {
    spectrum.assign(samples.begin(), samples.end());
    detail::fft_pow2(spectrum, false);
  } else {
    spectrum = detail::dft_bluestein(samples);
  }

  PowerSpectrum out;
  out.bin_hz = sample_rate_hz / static_cast<double>(n);
  out.power.resize(n / 2 + 1);
  for (std::size_t k = 0; k < out.power.size(); ++k) {
    out.power[k] = std::norm(spectrum[k]);
  }
  return out;
}

}  // namespace vigil
