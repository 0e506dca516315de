// tests/test_solver_mur.cpp

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

#include "pfnmf/solver_mur.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using pfnmf::FactorState;
using pfnmf::Matrix;
using pfnmf::MurConfig;
using pfnmf::MurResult;
using pfnmf::config_error;
using pfnmf::loss;
using pfnmf::mur_step;
using pfnmf::numeric_error;
using pfnmf::run_mur;

namespace {

FactorState make_state(Matrix drum_act, Matrix harm_basis, Matrix harm_act) {
  FactorState state;
  state.drum_activations = std::move(drum_act);
  state.harmonic_basis = std::move(harm_basis);
  state.harmonic_activations = std::move(harm_act);
  return state;
}

FactorState random_state(int bins, int frames, int drum_rank, int harmonic_rank,
                         unsigned seed) {
  return make_state(test_support::random_nonneg(drum_rank, frames, seed),
                    test_support::random_nonneg(bins, harmonic_rank, seed + 1),
                    test_support::random_nonneg(harmonic_rank, frames, seed + 2));
}

// The update order of the three factors matters; this variant deliberately
// refreshes the harmonic activations BEFORE the harmonic basis, against the
// contract, to guard the sequencing test.
FactorState mis_sequenced_step(const Matrix& v, const Matrix& drum_basis,
                               FactorState state, double epsilon) {
  Matrix recon = drum_basis * state.drum_activations +
                 state.harmonic_basis * state.harmonic_activations;
  state.drum_activations.array() *=
      (drum_basis.transpose() * v).array() /
      ((drum_basis.transpose() * recon).array() + epsilon);

  recon = drum_basis * state.drum_activations +
          state.harmonic_basis * state.harmonic_activations;
  state.harmonic_activations.array() *=
      (state.harmonic_basis.transpose() * v).array() /
      ((state.harmonic_basis.transpose() * recon).array() + epsilon);

  recon = drum_basis * state.drum_activations +
          state.harmonic_basis * state.harmonic_activations;
  state.harmonic_basis.array() *=
      (v * state.harmonic_activations.transpose()).array() /
      ((recon * state.harmonic_activations.transpose()).array() + epsilon);
  return state;
}

}  // namespace

TEST(MurStep, ExactReconstructionIsAFixedPointUpToEpsilon) {
  const Matrix drum_basis = test_support::random_nonneg(8, 2, 1, 1.0);
  const FactorState state = random_state(8, 6, 2, 3, 2);
  const Matrix v = drum_basis * state.drum_activations +
                   state.harmonic_basis * state.harmonic_activations;
  const FactorState next = mur_step(v, drum_basis, state, 1e-12);
  EXPECT_LT((next.drum_activations - state.drum_activations).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((next.harmonic_basis - state.harmonic_basis).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((next.harmonic_activations - state.harmonic_activations).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST(MurStep, ScalarSequenceMatchesHandEvaluation) {
  // m = n = r_D = r_H = 1, V = 4, everything else 1, epsilon = 0:
  // the three sequential updates give 2, 4/3, and 1.2 exactly.
  Matrix v(1, 1), drum_basis(1, 1);
  v << 4.0;
  drum_basis << 1.0;
  const FactorState state =
      make_state(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  const FactorState next = mur_step(v, drum_basis, state, 0.0);
  EXPECT_DOUBLE_EQ(next.drum_activations(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(next.harmonic_basis(0, 0), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(next.harmonic_activations(0, 0), 1.2);
}

TEST(MurStep, ZeroRowsStayZero) {
  const Matrix v = test_support::random_nonneg(6, 8, 3);
  const Matrix drum_basis = test_support::random_nonneg(6, 3, 4);
  FactorState state = random_state(6, 8, 3, 2, 5);
  state.drum_activations.row(1).setZero();
  FactorState current = state;
  for (int t = 0; t < 5; ++t) {
    current = mur_step(v, drum_basis, current, 1e-12);
    EXPECT_EQ(current.drum_activations.row(1).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(MurStep, PreservesNonnegativity) {
  const Matrix v = test_support::random_nonneg(10, 12, 6);
  const Matrix drum_basis = test_support::random_nonneg(10, 3, 7);
  FactorState state = random_state(10, 12, 3, 4, 8);
  for (int t = 0; t < 10; ++t) {
    state = mur_step(v, drum_basis, state, 1e-12);
    EXPECT_GE(state.drum_activations.minCoeff(), 0.0);
    EXPECT_GE(state.harmonic_basis.minCoeff(), 0.0);
    EXPECT_GE(state.harmonic_activations.minCoeff(), 0.0);
  }
}

TEST(MurStep, SequencingMattersAndOursIsTheContractOne) {
  const Matrix v = test_support::random_nonneg(7, 9, 9);
  const Matrix drum_basis = test_support::random_nonneg(7, 2, 10);
  const FactorState state = random_state(7, 9, 2, 3, 11);
  const FactorState ours = mur_step(v, drum_basis, state, 1e-12);
  const FactorState wrong = mis_sequenced_step(v, drum_basis, state, 1e-12);
  EXPECT_GT((ours.harmonic_basis - wrong.harmonic_basis).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RunMur, LossIsMonotoneOverManySeeds) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Matrix v = test_support::random_nonneg(12, 15, 100 + seed);
    const Matrix drum_basis = test_support::random_nonneg(12, 3, 200 + seed);
    MurConfig config;
    config.iterations = 30;
    const MurResult result =
        run_mur(v, drum_basis, random_state(12, 15, 3, 4, 300 + seed), config);
    for (std::size_t t = 1; t < result.trace.entries.size(); ++t) {
      const double before = result.trace.entries[t - 1].loss;
      const double after = result.trace.entries[t].loss;
      EXPECT_LE(after, before + 1e-10 * std::max(1.0, before));
    }
  }
}

TEST(RunMur, TraceHasInitialEntryPlusOnePerIteration) {
  const Matrix v = test_support::random_nonneg(6, 7, 20);
  const Matrix drum_basis = test_support::random_nonneg(6, 2, 21);
  MurConfig config;
  config.iterations = 7;
  const MurResult result =
      run_mur(v, drum_basis, random_state(6, 7, 2, 2, 22), config);
  ASSERT_EQ(result.trace.entries.size(), 8u);
  EXPECT_EQ(result.trace.entries.front().iteration, 0);
  EXPECT_EQ(result.trace.entries.back().iteration, 7);
  for (std::size_t t = 1; t < result.trace.entries.size(); ++t)
    EXPECT_GE(result.trace.entries[t].elapsed_seconds,
              result.trace.entries[t - 1].elapsed_seconds);
}

TEST(RunMur, SingleIterationEqualsOneStep) {
  const Matrix v = test_support::random_nonneg(5, 6, 23);
  const Matrix drum_basis = test_support::random_nonneg(5, 2, 24);
  const FactorState init = random_state(5, 6, 2, 3, 25);
  MurConfig config;
  config.iterations = 1;
  const MurResult result = run_mur(v, drum_basis, init, config);
  const FactorState expected = mur_step(v, drum_basis, init, config.epsilon);
  EXPECT_EQ(result.state.drum_activations, expected.drum_activations);
  EXPECT_EQ(result.state.harmonic_basis, expected.harmonic_basis);
  EXPECT_EQ(result.state.harmonic_activations, expected.harmonic_activations);
}

TEST(RunMur, RejectsNonPositiveIterationCount) {
  const Matrix v = test_support::random_nonneg(4, 4, 26);
  const Matrix drum_basis = test_support::random_nonneg(4, 2, 27);
  MurConfig config;
  config.iterations = 0;
  EXPECT_THROW(run_mur(v, drum_basis, random_state(4, 4, 2, 2, 28), config),
               config_error);
  config.iterations = 5;
  config.epsilon = 0.0;
  EXPECT_THROW(run_mur(v, drum_basis, random_state(4, 4, 2, 2, 28), config),
               config_error);
  config.epsilon = 1e-3;  // above the allowed ceiling
  EXPECT_THROW(run_mur(v, drum_basis, random_state(4, 4, 2, 2, 28), config),
               config_error);
}

TEST(RunMur, ZeroTargetShrinksTheLossTowardZero) {
  const Matrix v = Matrix::Zero(6, 8);
  const Matrix drum_basis = test_support::random_nonneg(6, 2, 29);
  MurConfig config;
  config.iterations = 50;
  const MurResult result =
      run_mur(v, drum_basis, random_state(6, 8, 2, 3, 30), config);
  for (std::size_t t = 1; t < result.trace.entries.size(); ++t)
    EXPECT_LE(result.trace.entries[t].loss, result.trace.entries[t - 1].loss + 1e-15);
  EXPECT_LT(result.trace.entries.back().loss, 0.01 * result.trace.entries.front().loss);
}

TEST(RunMur, ReportsNonFiniteWithIterationContext) {
  Matrix v = test_support::random_nonneg(4, 5, 31);
  v(1, 2) = std::numeric_limits<double>::quiet_NaN();
  const Matrix drum_basis = test_support::random_nonneg(4, 2, 32);
  MurConfig config;
  config.iterations = 3;
  try {
    run_mur(v, drum_basis, random_state(4, 5, 2, 2, 33), config);
    FAIL() << "expected numeric_error";
  } catch (const numeric_error& e) {
    EXPECT_NE(std::string(e.what()).find("iteration 1"), std::string::npos);
  }
}
