// Copyright 2026 The cellmode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cellmode {

struct Spectrum {
  /// |X_k| for k = 0..n-1.
  std::vector<double> bin_magnitudes;
  /// sample_rate / n.
  double bin_width_hz = 0.0;

  double frequency_of(std::size_t bin) const noexcept {
    return static_cast<double>(bin) * bin_width_hz;
  }
};

/// Forward DFT, X_k = sum_j x_j exp(-2 pi i j k / n). Power-of-two lengths
/// use an iterative radix-2 FFT; every other length goes through Bluestein's
/// chirp-z transform on a padded power-of-two FFT.
///
/// Throws DomainError on empty input.
std::vector<std::complex<double>> fft(std::span<const double> signal);

/// Magnitude spectrum of a real signal sampled at sample_rate_hz.
Spectrum dft(std::span<const double> signal, double sample_rate_hz);

}  // namespace cellmode
