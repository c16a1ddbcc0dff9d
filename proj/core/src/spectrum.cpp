// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#include "cellmode/spectrum.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "cellmode/error.hpp"

namespace cellmode {
namespace {

using cplx = std::complex<double>;

// Plain product; operator* on std::complex adds the Annex G NaN recovery.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// In-place iterative Cooley-Tukey. data.size() must be a power of two.
void radix2(std::vector<cplx>& data, bool inverse) {
  const std::size_t n = data.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles are evaluated directly rather than by recurrence to keep
      // the error at a few ulps.
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(len);
      const cplx w(std::cos(angle), std::sin(angle));
      for (std::size_t start = 0; start < n; start += len) {
        const cplx u = data[start + k];
        const cplx v = mul(data[start + k + half], w);
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    for (auto& x : data) x /= static_cast<double>(n);
  }
}

std::vector<cplx> bluestein(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);

  // chirp_k = exp(-i pi k^2 / n); k^2 is reduced mod 2n so the angle stays small.
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % (2 * n);
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cplx(std::cos(angle), std::sin(angle));
  }

  std::vector<cplx> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = std::conj(chirp[k]);
    b[m - k] = std::conj(chirp[k]);
  }
  radix2(a, false);
  radix2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] = mul(a[k], b[k]);
  radix2(a, true);

  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = mul(a[k], chirp[k]);
  return out;
}

}  // namespace

std::vector<cplx> fft(std::span<const double> signal) {
  if (signal.empty()) throw DomainError("dft of an empty signal");
  if (std::has_single_bit(signal.size())) {
    std::vector<cplx> data(signal.begin(), signal.end());
    radix2(data, false);
    return data;
  }
  return bluestein(signal);
}

Spectrum dft(std::span<const double> signal, double sample_rate_hz) {
  const auto bins = fft(signal);
  Spectrum s;
  s.bin_magnitudes.reserve(bins.size());
  for (const auto& c : bins) s.bin_magnitudes.push_back(std::abs(c));
  s.bin_width_hz = sample_rate_hz / static_cast<double>(signal.size());
  return s;
}

}  // namespace cellmode
