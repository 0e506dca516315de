// pfnmf/solver_nenmf.hpp

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
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pfnmf/factor.hpp"

namespace pfnmf {

struct OgmConfig {
  int inner_iterations = 10;
  double spectral_norm_tolerance = 1e-10;
  int spectral_norm_max_iters = 10000;
};

struct NenmfConfig {
  int outer_iterations = 10;
  OgmConfig ogm;
};

namespace detail {

inline void validate(const OgmConfig& config) {
  if (config.inner_iterations < 1)
    throw config_error("OGM inner iteration count must be at least 1");
  if (!(config.spectral_norm_tolerance > 0) || config.spectral_norm_tolerance >= 1)
    throw config_error("spectral norm tolerance must be in (0, 1)");
  if (config.spectral_norm_max_iters < 1)
    throw config_error("spectral norm max iterations must be at least 1");
}

inline void validate(const NenmfConfig& config) {
  if (config.outer_iterations < 1)
    throw config_error("NeNMF outer iteration count must be at least 1");
  validate(config.ogm);
}

}  // namespace detail

/// Largest singular value of w, estimated by power iteration on the Gram
/// matrix w^T w from a deterministic all-ones start vector. The Rayleigh
/// quotient converges from below, so the returned value is a lower bound on
/// the true norm, tight to roughly the given relative tolerance.
inline double spectral_norm(const Matrix& w, double tolerance, int max_iterations) {
  if (!(tolerance > 0) || tolerance >= 1)
    throw config_error("spectral norm tolerance must be in (0, 1)");
  if (max_iterations < 1) throw config_error("spectral norm max iterations must be at least 1");
  if (w.size() == 0 || (w.array() == 0).all())
    throw data_error("spectral norm of an all-zero matrix is not defined here");

  const Matrix gram = w.transpose() * w;
  Vector direction = Vector::Ones(gram.rows()) / std::sqrt(static_cast<double>(gram.rows()));
  double eigen_estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector image = gram * direction;
    const double rayleigh = direction.dot(image);
    const double norm = image.norm();
    if (norm == 0.0) break;  // unreachable for a nonzero nonnegative matrix
    direction = image / norm;
    if (std::abs(rayleigh - eigen_estimate) <= tolerance * rayleigh) {
      eigen_estimate = rayleigh;
      break;
    }
    eigen_estimate = rayleigh;
  }
  return std::sqrt(eigen_estimate);
}

inline double spectral_norm(const Matrix& w, const OgmConfig& config) {
  return spectral_norm(w, config.spectral_norm_tolerance, config.spectral_norm_max_iters);
}

/// Momentum coefficient recurrence of the accelerated scheme, starting from
/// alpha_1 = 1. Strictly increasing, and each step grows by at least 1/2.
inline double ogm_momentum_next(double alpha) {
  return 0.5 * (1.0 + std::sqrt(4.0 * alpha * alpha + 1.0));
}

namespace detail {

// Projected gradient descent with Nesterov momentum on
//   min_{H >= 0} 0.5 || W H - V ||_F^2
// using a fixed step 1 / norm_upper^2, where norm_upper >= ||W||. The
// gradient W^T (W Y - V) is evaluated as (W^T W) Y - W^T V with both
// constant pieces precomputed. The predecessor of the first iterate is H0
// itself; alpha_1 = 1 makes that choice inert.
inline Matrix ogm_iterate(const Matrix& w, const Matrix& h0, const Matrix& v,
                          double norm_upper, int inner_iterations) {
  if (w.rows() != v.rows() || h0.rows() != w.cols() || h0.cols() != v.cols())
    throw data_error("OGM operand shapes do not agree");
  if ((h0.array() < 0).any())
    throw data_error("OGM starting point must be nonnegative");

  const double inverse_step_scale = 1.0 / (norm_upper * norm_upper);
  const Matrix gram = w.transpose() * w;        // r x r
  const Matrix target = w.transpose() * v;      // r x n

  Matrix previous = h0;
  Matrix extrapolated = h0;
  Matrix current;
  double alpha = 1.0;
  for (int k = 1; k <= inner_iterations; ++k) {
    current = (extrapolated - inverse_step_scale * (gram * extrapolated - target))
                  .cwiseMax(0.0);
    if (!current.allFinite())
      throw numeric_error("OGM produced a non-finite value at inner iteration " +
                          std::to_string(k));
    const double alpha_next = ogm_momentum_next(alpha);
    extrapolated = current + ((alpha - 1.0) / alpha_next) * (current - previous);
    previous = current;
    alpha = alpha_next;
  }
  return previous;
}

}  // namespace detail

/// Solves one convex subproblem min_{H >= 0} ||W H - V||_F^2 to O(1/K^2)
/// accuracy. V may contain negative entries (the alternating driver passes
/// residuals); the output is always nonnegative. The step size is
/// 1 / (estimate * (1 + tolerance))^2 so that the power-iteration
/// underestimate of ||W|| can never make the step too long.
inline Matrix ogm(const Matrix& w, const Matrix& h0, const Matrix& v,
                  const OgmConfig& config) {
  detail::validate(config);
  const double norm_upper =
      spectral_norm(w, config) * (1.0 + config.spectral_norm_tolerance);
  return detail::ogm_iterate(w, h0, v, norm_upper, config.inner_iterations);
}

namespace detail {

inline FactorState nenmf_step_impl(const Matrix& v, const Matrix& drum_basis,
                                   double drum_basis_norm_upper, FactorState state,
                                   const NenmfConfig& config,
                                   std::vector<std::string>* warnings) {
  const double safety = 1.0 + config.ogm.spectral_norm_tolerance;

  state.drum_activations = ogm_iterate(
      drum_basis, state.drum_activations,
      v - state.harmonic_basis * state.harmonic_activations, drum_basis_norm_upper,
      config.ogm.inner_iterations);

  const Matrix residual = v - drum_basis * state.drum_activations;

  if ((state.harmonic_activations.array() == 0).all()) {
    if (warnings)
      warnings->push_back(
          "harmonic activations are all zero; skipped the harmonic basis update");
  } else {
    // The design matrix of this subproblem is the transposed activations;
    // the norm is transpose-invariant but the transposed Gram is tiny.
    const double norm_upper =
        spectral_norm(state.harmonic_activations.transpose(), config.ogm) * safety;
    state.harmonic_basis =
        ogm_iterate(state.harmonic_activations.transpose(),
                    state.harmonic_basis.transpose(), residual.transpose(), norm_upper,
                    config.ogm.inner_iterations)
            .transpose();
  }

  if ((state.harmonic_basis.array() == 0).all()) {
    if (warnings)
      warnings->push_back(
          "harmonic basis is all zero; skipped the harmonic activations update");
  } else {
    const double norm_upper = spectral_norm(state.harmonic_basis, config.ogm) * safety;
    state.harmonic_activations =
        ogm_iterate(state.harmonic_basis, state.harmonic_activations, residual,
                    norm_upper, config.ogm.inner_iterations);
  }
  return state;
}

}  // namespace detail

/// One outer alternating-minimization sweep: OGM on the drum activations
/// against V minus the harmonic part, then OGM on the (transposed) harmonic
/// basis and on the harmonic activations against V minus the fresh drum
/// part. A factor that would give OGM an all-zero design matrix is skipped
/// for the sweep and noted in *warnings.
inline FactorState nenmf_step(const Matrix& v, const Matrix& drum_basis,
                              FactorState state, const NenmfConfig& config,
                              std::vector<std::string>* warnings = nullptr) {
  detail::validate(config);
  detail::check_shapes(v, drum_basis, state);
  const double safety = 1.0 + config.ogm.spectral_norm_tolerance;
  const double drum_norm_upper = spectral_norm(drum_basis, config.ogm) * safety;
  return detail::nenmf_step_impl(v, drum_basis, drum_norm_upper, std::move(state),
                                 config, warnings);
}

inline FactorState nenmf_step(const Spectrogram& v, const Dictionary& dict,
                              FactorState state, const NenmfConfig& config,
                              std::vector<std::string>* warnings = nullptr) {
  return nenmf_step(v.magnitudes, dict.basis, std::move(state), config, warnings);
}

struct NenmfResult {
  FactorState state;
  ConvergenceTrace trace;  // loss before iteration 1 plus one entry per outer sweep
  std::vector<std::string> warnings;
};

/// Runs T outer sweeps. The dictionary's spectral norm is computed once and
/// reused; the harmonic factors' norms are recomputed every sweep because
/// those matrices change. Loss evaluation stays outside the timed window.
inline NenmfResult run_nenmf(const Matrix& v, const Matrix& drum_basis,
                             FactorState init, const NenmfConfig& config) {
  detail::validate(config);
  detail::check_shapes(v, drum_basis, init);

  const double safety = 1.0 + config.ogm.spectral_norm_tolerance;
  const double drum_norm_upper = spectral_norm(drum_basis, config.ogm) * safety;

  NenmfResult result;
  result.state = std::move(init);
  result.trace.entries.push_back({0, loss(v, drum_basis, result.state), 0.0});

  double elapsed = 0.0;
  std::vector<std::string> step_warnings;
  for (int t = 1; t <= config.outer_iterations; ++t) {
    step_warnings.clear();
    const auto start = std::chrono::steady_clock::now();
    result.state = detail::nenmf_step_impl(v, drum_basis, drum_norm_upper,
                                           std::move(result.state), config,
                                           &step_warnings);
    elapsed += std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                   .count();
    if (!result.state.all_finite())
      throw numeric_error("NeNMF produced a non-finite value at outer iteration " +
                          std::to_string(t));
    for (const std::string& message : step_warnings)
      result.warnings.push_back("outer iteration " + std::to_string(t) + ": " + message);
    result.trace.entries.push_back({t, loss(v, drum_basis, result.state), elapsed});
  }
  return result;
}

inline NenmfResult run_nenmf(const Spectrogram& v, const Dictionary& dict,
                             FactorState init, const NenmfConfig& config) {
  return run_nenmf(v.magnitudes, dict.basis, std::move(init), config);
}

}  // namespace pfnmf
