// tests/support.hpp

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

// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately written without touching the library's own FFT,
// solver, or matching code, so it can serve as a second opinion.

#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace test_support {

using Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Temp directories and WAV fixtures

/// A fresh directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pfnmf_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

enum class WavEncoding { pcm8, pcm16, pcm24, pcm32, float32 };

/// Writes a canonical RIFF/WAVE file. channels[c][i] is sample i of channel
/// c in [-1, 1]; integer encodings scale by 2^(bits-1) and round.
inline void write_wav(const std::string& path,
                      const std::vector<std::vector<double>>& channels,
                      int sample_rate, WavEncoding encoding = WavEncoding::pcm16) {
  const std::size_t n_channels = channels.size();
  const std::size_t n_samples = channels.front().size();
  int bits = 16;
  switch (encoding) {
    case WavEncoding::pcm8: bits = 8; break;
    case WavEncoding::pcm16: bits = 16; break;
    case WavEncoding::pcm24: bits = 24; break;
    case WavEncoding::pcm32: bits = 32; break;
    case WavEncoding::float32: bits = 32; break;
  }
  const bool is_float = encoding == WavEncoding::float32;
  const std::uint16_t format = is_float ? 3 : 1;
  const std::uint32_t byte_rate =
      static_cast<std::uint32_t>(sample_rate * n_channels * (bits / 8));
  const std::uint16_t block_align = static_cast<std::uint16_t>(n_channels * (bits / 8));
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(n_samples * n_channels * (bits / 8));

  std::vector<unsigned char> bytes;
  auto put_u16 = [&](std::uint16_t v) {
    bytes.push_back(v & 0xFF);
    bytes.push_back((v >> 8) & 0xFF);
  };
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back((v >> (8 * i)) & 0xFF);
  };
  auto put_tag = [&](const char* tag) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>(tag[i]));
  };

  put_tag("RIFF");
  put_u32(36 + data_size);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(format);
  put_u16(static_cast<std::uint16_t>(n_channels));
  put_u32(static_cast<std::uint32_t>(sample_rate));
  put_u32(byte_rate);
  put_u16(block_align);
  put_u16(static_cast<std::uint16_t>(bits));
  put_tag("data");
  put_u32(data_size);

  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      const double x = channels[c][i];
      switch (encoding) {
        case WavEncoding::pcm8: {
          long v = std::lround(x * 128.0) + 128;
          v = std::clamp(v, 0L, 255L);
          bytes.push_back(static_cast<unsigned char>(v));
          break;
        }
        case WavEncoding::pcm16: {
          long v = std::clamp(std::lround(x * 32768.0), -32768L, 32767L);
          put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
          break;
        }
        case WavEncoding::pcm24: {
          long v = std::clamp(std::lround(x * 8388608.0), -8388608L, 8388607L);
          const auto u = static_cast<std::uint32_t>(static_cast<std::int32_t>(v));
          bytes.push_back(u & 0xFF);
          bytes.push_back((u >> 8) & 0xFF);
          bytes.push_back((u >> 16) & 0xFF);
          break;
        }
        case WavEncoding::pcm32: {
          const double scaled = x * 2147483648.0;
          const auto v = static_cast<std::int64_t>(std::llround(
              std::clamp(scaled, -2147483648.0, 2147483647.0)));
          put_u32(static_cast<std::uint32_t>(static_cast<std::int32_t>(v)));
          break;
        }
        case WavEncoding::float32: {
          const float f = static_cast<float>(x);
          std::uint32_t u;
          std::memcpy(&u, &f, 4);
          put_u32(u);
          break;
        }
      }
    }
  }

  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// ---------------------------------------------------------------------------
// Direct-summation DFT oracle

/// One-sided magnitude spectrum of one frame by direct O(n^2) summation,
/// with a periodic Hann window applied. Matches the layout of one STFT
/// column.
inline std::vector<double> dft_magnitude_oracle(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  std::vector<double> windowed(n);
  for (std::size_t i = 0; i < n; ++i)
    windowed[i] = frame[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                                   static_cast<double>(i) /
                                                   static_cast<double>(n)));
  std::vector<double> magnitudes(n / 2 + 1);
  for (std::size_t k = 0; k < magnitudes.size(); ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
      acc += windowed[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    magnitudes[k] = std::abs(acc);
  }
  return magnitudes;
}

// ---------------------------------------------------------------------------
// Nonnegative least squares oracle (Lawson-Hanson active set)

/// Solves min_{h >= 0} || W h - v ||_2 by the active-set method, using
/// Eigen's QR for the passive-set least-squares solves. Exact up to
/// floating-point error, independent of the library's projected-gradient
/// path.
inline Vector nnls_oracle(const Matrix& w, const Vector& v) {
  const Index r = w.cols();
  Vector solution = Vector::Zero(r);
  std::vector<bool> passive(static_cast<std::size_t>(r), false);
  Vector gradient = w.transpose() * (v - w * solution);
  const double tolerance =
      1e-12 * std::max(1.0, gradient.cwiseAbs().maxCoeff());

  for (int guard = 0; guard < 30 * static_cast<int>(r) + 30; ++guard) {
    Index best = -1;
    double best_gradient = tolerance;
    for (Index i = 0; i < r; ++i)
      if (!passive[static_cast<std::size_t>(i)] && gradient[i] > best_gradient) {
        best_gradient = gradient[i];
        best = i;
      }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    while (true) {
      std::vector<Index> indices;
      for (Index i = 0; i < r; ++i)
        if (passive[static_cast<std::size_t>(i)]) indices.push_back(i);
      Matrix w_passive(w.rows(), static_cast<Index>(indices.size()));
      for (std::size_t k = 0; k < indices.size(); ++k)
        w_passive.col(static_cast<Index>(k)) = w.col(indices[k]);
      const Vector candidate = w_passive.colPivHouseholderQr().solve(v);

      bool feasible = true;
      double step = 1.0;
      for (std::size_t k = 0; k < indices.size(); ++k) {
        if (candidate[static_cast<Index>(k)] <= 0) {
          feasible = false;
          const double current = solution[indices[k]];
          const double proposed = candidate[static_cast<Index>(k)];
          if (current - proposed > 0)
            step = std::min(step, current / (current - proposed));
        }
      }
      if (feasible) {
        solution.setZero();
        for (std::size_t k = 0; k < indices.size(); ++k)
          solution[indices[k]] = candidate[static_cast<Index>(k)];
        break;
      }
      for (std::size_t k = 0; k < indices.size(); ++k) {
        const double moved = solution[indices[k]] +
                             step * (candidate[static_cast<Index>(k)] -
                                     solution[indices[k]]);
        solution[indices[k]] = moved;
      }
      for (std::size_t k = 0; k < indices.size(); ++k)
        if (solution[indices[k]] <= 1e-14) {
          solution[indices[k]] = 0.0;
          passive[static_cast<std::size_t>(indices[k])] = false;
        }
    }
    gradient = w.transpose() * (v - w * solution);
  }
  return solution;
}

/// Column-by-column NNLS for the matrix problem min_{H >= 0} ||W H - V||_F.
inline Matrix nnls_oracle_matrix(const Matrix& w, const Matrix& v) {
  Matrix h(w.cols(), v.cols());
  for (Index j = 0; j < v.cols(); ++j) h.col(j) = nnls_oracle(w, v.col(j));
  return h;
}

/// Largest singular value through Eigen's symmetric eigensolver on the Gram
/// matrix; the second opinion for the power-iteration implementation.
inline double spectral_norm_oracle(const Matrix& w) {
  const Matrix gram = w.transpose() * w;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  return std::sqrt(solver.eigenvalues().maxCoeff());
}

// ---------------------------------------------------------------------------
// Random matrices

inline Matrix random_nonneg(Index rows, Index cols, unsigned seed, double scale = 1.0) {
  std::mt19937 engine(seed);
  std::uniform_real_distribution<double> dist(0.0, scale);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = dist(engine);
  return out;
}

inline Matrix random_signed(Index rows, Index cols, unsigned seed, double scale = 1.0) {
  std::mt19937 engine(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = dist(engine);
  return out;
}

}  // namespace test_support
