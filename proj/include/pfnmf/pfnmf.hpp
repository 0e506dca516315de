// pfnmf/pfnmf.hpp

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

// Umbrella header: drum transcription by partially fixed nonnegative matrix
// factorization, with multiplicative-update and Nesterov-accelerated
// projected-gradient solvers, onset detection, and F-score evaluation.

#pragma once

#include "pfnmf/common.hpp"
#include "pfnmf/csv.hpp"
#include "pfnmf/dictionary.hpp"
#include "pfnmf/factor.hpp"
#include "pfnmf/onsets.hpp"
#include "pfnmf/solver_mur.hpp"
#include "pfnmf/solver_nenmf.hpp"
#include "pfnmf/stft.hpp"
#include "pfnmf/wav.hpp"
