// Copyright 2026 The sgshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SGSHAPE_COMMON_HPP_
#define SGSHAPE_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace sgshape {

using StateId = int;

// Default tolerances. Every API that compares floats takes its own tolerance;
// these are the values used when a caller has no better choice.
inline constexpr double kStructuralTolerance = 1e-12;
inline constexpr double kValueTolerance = 1e-9;
inline constexpr double kRegretTolerance = 1e-8;

// Largest state count for which policy evaluation uses a direct linear solve.
inline constexpr int kDirectSolveMaxStates = 64;
inline constexpr int kMaxIterations = 100000;

// Input violates a documented precondition (wrong player count, not zero-sum,
// nonzero potential at a terminal, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A fixed-point iteration failed to converge, or the linear system for an
// undiscounted improper profile is singular.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive search space exceeds its guard.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class CancelledError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgshape

#endif  // SGSHAPE_COMMON_HPP_
