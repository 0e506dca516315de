// pfnmf/common.hpp

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

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <system_error>

#include <Eigen/Dense>

namespace pfnmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Invalid parameters or a contradictory configuration. CLI exit code 1.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data, or mismatched shapes between
/// inputs. CLI exit code 2.
class data_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value produced during iteration. CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Deterministic Unif(0,1) stream built on std::mt19937_64.
///
/// The engine's output sequence is fully specified by the standard, and the
/// mapping to (0, 1) is done here rather than through
/// std::uniform_real_distribution (whose output is implementation-defined).
/// Identical seeds therefore produce bit-identical draws everywhere.
/// Values are strictly inside the open interval: ((x >> 11) + 0.5) * 2^-53.
class UniformRng {
public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

  double next() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

private:
  std::mt19937_64 engine_;
};

namespace detail {

// Shortest decimal representation that parses back to the same double.
// Every number the library writes to a file goes through this, so emitted
// files round-trip exactly.
inline std::string format_number(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

}  // namespace detail

}  // namespace pfnmf
