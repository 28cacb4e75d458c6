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

#ifndef SGSHAPE_PARALLEL_HPP_
#define SGSHAPE_PARALLEL_HPP_

#include <cstdint>

#ifdef SGSHAPE_USE_OPENMP
#include <omp.h>
#endif

namespace sgshape {

// Selects between the OpenMP kernels and the serial reference loops. Both
// paths write results into per-index slots and reduce in index order, so
// their outputs are bit-identical.
enum class Execution { kSerial, kParallel };

inline bool parallel_available() {
#ifdef SGSHAPE_USE_OPENMP
  return true;
#else
  return false;
#endif
}

inline int max_threads() {
#ifdef SGSHAPE_USE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// f(i) for i in [0, n). f must only write to slots owned by i and must not
// throw.
template <typename F>
void parallel_for(Execution exec, std::int64_t n, F&& f) {
#ifdef SGSHAPE_USE_OPENMP
  if (exec == Execution::kParallel && n > 1) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      f(i);
    }
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    f(i);
  }
}

// Same as parallel_for but with dynamic scheduling, for iterations whose cost
// varies a lot (trials, candidate profiles).
template <typename F>
void parallel_for_dynamic(Execution exec, std::int64_t n, F&& f) {
#ifdef SGSHAPE_USE_OPENMP
  if (exec == Execution::kParallel && n > 1) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      f(i);
    }
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    f(i);
  }
}

}  // namespace sgshape

#endif  // SGSHAPE_PARALLEL_HPP_
