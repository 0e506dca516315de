// pfnmf/factor.hpp

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

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "pfnmf/common.hpp"
#include "pfnmf/dictionary.hpp"
#include "pfnmf/stft.hpp"

namespace pfnmf {

/// The three trainable factors of the partially fixed model. The drum basis
/// itself lives in Dictionary and is never part of this state.
///
/// drum_activations      r_D x n   per-frame gains of each drum component
/// harmonic_basis        m   x r_H spectral basis of everything non-drum
/// harmonic_activations  r_H x n   per-frame gains of the harmonic basis
struct FactorState {
  Matrix drum_activations;
  Matrix harmonic_basis;
  Matrix harmonic_activations;

  Index drum_rank() const { return drum_activations.rows(); }
  Index harmonic_rank() const { return harmonic_basis.cols(); }
  Index frames() const { return drum_activations.cols(); }
  Index bins() const { return harmonic_basis.rows(); }

  bool all_finite() const {
    return drum_activations.allFinite() && harmonic_basis.allFinite() &&
           harmonic_activations.allFinite();
  }
};

struct TracePoint {
  int iteration = 0;
  double loss = 0.0;
  double elapsed_seconds = 0.0;
};

/// Loss values per iteration, with cumulative solver time. Entry 0 is the
/// loss of the initial state at time 0.
struct ConvergenceTrace {
  std::vector<TracePoint> entries;
};

namespace detail {

inline void check_shapes(const Matrix& v, const Matrix& drum_basis,
                         const FactorState& state) {
  const Index m = v.rows(), n = v.cols();
  if (drum_basis.rows() != m)
    throw data_error("dictionary has " + std::to_string(drum_basis.rows()) +
                     " bins but the spectrogram has " + std::to_string(m));
  if (state.drum_activations.rows() != drum_basis.cols() ||
      state.drum_activations.cols() != n || state.harmonic_basis.rows() != m ||
      state.harmonic_activations.rows() != state.harmonic_basis.cols() ||
      state.harmonic_activations.cols() != n)
    throw data_error("factor state shapes do not match the spectrogram and dictionary");
}

}  // namespace detail

/// Half the squared Frobenius norm of the reconstruction residual:
/// 0.5 * || V - (W_D H_D + W_H H_H) ||_F^2.
inline double loss(const Matrix& v, const Matrix& drum_basis, const FactorState& state) {
  detail::check_shapes(v, drum_basis, state);
  const Matrix residual = v - drum_basis * state.drum_activations -
                          state.harmonic_basis * state.harmonic_activations;
  return 0.5 * residual.squaredNorm();
}

inline double loss(const Spectrogram& v, const Dictionary& dict, const FactorState& state) {
  return loss(v.magnitudes, dict.basis, state);
}

/// Seeded Unif(0,1) initialization of all three factors. Entries are drawn
/// in column-major order, drum activations first, then the harmonic basis,
/// then the harmonic activations; the same seed reproduces the state bit
/// for bit.
inline FactorState random_init(Index bins, Index frames, Index drum_rank,
                               Index harmonic_rank, std::uint64_t seed) {
  if (bins < 1 || frames < 1 || drum_rank < 1 || harmonic_rank < 1)
    throw config_error("all factor dimensions must be at least 1");
  UniformRng rng(seed);
  FactorState state;
  state.drum_activations.resize(drum_rank, frames);
  state.harmonic_basis.resize(bins, harmonic_rank);
  state.harmonic_activations.resize(harmonic_rank, frames);
  for (Matrix* matrix : {&state.drum_activations, &state.harmonic_basis,
                         &state.harmonic_activations}) {
    double* p = matrix->data();
    for (Index i = 0; i < matrix->size(); ++i) p[i] = rng.next();
  }
  return state;
}

namespace detail {

inline void hash_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {  // FNV-1a
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace detail

/// FNV-1a hash of the state's dimensions and raw matrix bytes. Two states
/// hash equal iff they are bit-identical (up to hash collisions).
inline std::uint64_t state_hash(const FactorState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Matrix* matrix : {&state.drum_activations, &state.harmonic_basis,
                               &state.harmonic_activations}) {
    const std::int64_t dims[2] = {matrix->rows(), matrix->cols()};
    detail::hash_bytes(h, dims, sizeof dims);
    detail::hash_bytes(h, matrix->data(),
                       static_cast<std::size_t>(matrix->size()) * sizeof(double));
  }
  return h;
}

}  // namespace pfnmf
