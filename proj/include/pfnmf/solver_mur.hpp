// pfnmf/solver_mur.hpp

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

#include <chrono>
#include <string>
#include <utility>

#include "pfnmf/factor.hpp"

namespace pfnmf {

struct MurConfig {
  int iterations = 100;
  double epsilon = 1e-12;  // added to every update denominator
};

namespace detail {

inline void validate(const MurConfig& config) {
  if (config.iterations < 1) throw config_error("MUR iteration count must be at least 1");
  if (!(config.epsilon > 0) || config.epsilon > 1e-6)
    throw config_error("MUR epsilon must be in (0, 1e-6]");
}

}  // namespace detail

/// One multiplicative update sweep. The three factors are updated strictly
/// in sequence: drum activations first, then the harmonic basis using the
/// fresh drum activations, then the harmonic activations using both fresh
/// factors. Every denominator gets +epsilon. Nonnegativity and exact zeros
/// are preserved.
inline FactorState mur_step(const Matrix& v, const Matrix& drum_basis,
                            FactorState state, double epsilon) {
  detail::check_shapes(v, drum_basis, state);

  Matrix recon = drum_basis * state.drum_activations +
                 state.harmonic_basis * state.harmonic_activations;
  state.drum_activations.array() *=
      (drum_basis.transpose() * v).array() /
      ((drum_basis.transpose() * recon).array() + epsilon);

  recon.noalias() = drum_basis * state.drum_activations +
                    state.harmonic_basis * state.harmonic_activations;
  state.harmonic_basis.array() *=
      (v * state.harmonic_activations.transpose()).array() /
      ((recon * state.harmonic_activations.transpose()).array() + epsilon);

  recon.noalias() = drum_basis * state.drum_activations +
                    state.harmonic_basis * state.harmonic_activations;
  state.harmonic_activations.array() *=
      (state.harmonic_basis.transpose() * v).array() /
      ((state.harmonic_basis.transpose() * recon).array() + epsilon);

  return state;
}

inline FactorState mur_step(const Spectrogram& v, const Dictionary& dict,
                            FactorState state, double epsilon) {
  return mur_step(v.magnitudes, dict.basis, std::move(state), epsilon);
}

struct MurResult {
  FactorState state;
  ConvergenceTrace trace;  // loss before iteration 1 plus one entry per iteration
};

/// Runs a fixed number of multiplicative update sweeps. Loss evaluation is
/// kept outside the timed window; elapsed_seconds accumulates step time only.
inline MurResult run_mur(const Matrix& v, const Matrix& drum_basis, FactorState init,
                         const MurConfig& config) {
  detail::validate(config);
  detail::check_shapes(v, drum_basis, init);

  MurResult result;
  result.state = std::move(init);
  result.trace.entries.push_back({0, loss(v, drum_basis, result.state), 0.0});

  double elapsed = 0.0;
  for (int t = 1; t <= config.iterations; ++t) {
    const auto start = std::chrono::steady_clock::now();
    result.state = mur_step(v, drum_basis, std::move(result.state), config.epsilon);
    elapsed += std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                   .count();
    if (!result.state.all_finite())
      throw numeric_error("MUR produced a non-finite value at iteration " +
                          std::to_string(t));
    result.trace.entries.push_back({t, loss(v, drum_basis, result.state), elapsed});
  }
  return result;
}

inline MurResult run_mur(const Spectrogram& v, const Dictionary& dict, FactorState init,
                         const MurConfig& config) {
  return run_mur(v.magnitudes, dict.basis, std::move(init), config);
}

}  // namespace pfnmf
