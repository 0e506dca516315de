// pfnmf/stft.hpp

// Copyright 2026  The pfnmf authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pfnmf/common.hpp"
#include "pfnmf/wav.hpp"

namespace pfnmf {

/// Linear magnitude spectrogram: rows are frequency bins, columns are time
/// frames. time_resolution is hop_size / sample_rate in seconds per frame.
struct Spectrogram {
  Matrix magnitudes;
  int sample_rate = 0;
  double time_resolution = 0.0;

  Index bins() const { return magnitudes.rows(); }
  Index frames() const { return magnitudes.cols(); }
};

namespace detail {

// In-place iterative radix-2 FFT. n must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wn(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wn;
      }
    }
  }
}

// Direct O(n^2) transform for sizes that are not a power of two.
inline void dft_direct(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
      acc += a[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  a = std::move(out);
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Periodic Hann window of length n: 0.5 - 0.5 cos(2 pi i / n).
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

}  // namespace detail

/// Magnitude STFT. Frame k covers samples [k*hop, k*hop + window), with the
/// tail zero-padded, so the frame count is ceil(samples / hop). A periodic
/// Hann window is applied before the transform, and only the one-sided
/// spectrum (window/2 + 1 bins) is kept.
inline Spectrogram stft_magnitude(const AudioBuffer& audio, int window_length,
                                  int hop_size) {
  if (window_length < 2) throw config_error("window length must be at least 2");
  if (hop_size < 1) throw config_error("hop size must be positive");
  if (window_length < hop_size)
    throw config_error("window length must be at least the hop size");
  if (audio.samples.empty()) throw data_error("audio is empty");
  if (audio.sample_rate < 1) throw data_error("audio sample rate must be positive");

  const std::size_t window = static_cast<std::size_t>(window_length);
  const std::size_t hop = static_cast<std::size_t>(hop_size);
  const std::size_t total = audio.samples.size();
  const std::size_t n_frames = (total + hop - 1) / hop;
  const Index n_bins = static_cast<Index>(window / 2 + 1);

  const std::vector<double> win = detail::hann_window(window);
  const bool pow2 = detail::is_pow2(window);

  Spectrogram spec;
  spec.sample_rate = audio.sample_rate;
  spec.time_resolution = static_cast<double>(hop_size) / audio.sample_rate;
  spec.magnitudes.resize(n_bins, static_cast<Index>(n_frames));

  std::vector<std::complex<double>> frame(window);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const std::size_t offset = k * hop;
    for (std::size_t i = 0; i < window; ++i) {
      const double s = offset + i < total ? audio.samples[offset + i] : 0.0;
      frame[i] = std::complex<double>(s * win[i], 0.0);
    }
    if (pow2)
      detail::fft_pow2(frame);
    else
      detail::dft_direct(frame);
    for (Index b = 0; b < n_bins; ++b)
      spec.magnitudes(b, static_cast<Index>(k)) = std::abs(frame[static_cast<std::size_t>(b)]);
  }
  return spec;
}

}  // namespace pfnmf
