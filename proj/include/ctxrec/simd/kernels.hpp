// Copyright 2026 The ctxrec Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Inner-loop arithmetic for every layer in the library. All dense, LSTM and
// embedding math funnels through dot() and axpy(); each has a scalar
// reference and vectorized variants selected once at runtime.
//
// Selection order: CTXREC_SIMD environment variable ("scalar", "avx2",
// "neon") if set and supported, otherwise the best ISA the CPU reports.
// Vector variants reassociate sums, so results agree with the scalar
// reference to rounding, not bitwise. Within one process the choice is fixed
// and runs are bit-reproducible.

#include <cstddef>
#include <span>
#include <string_view>

namespace ctxrec::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace neon
#endif

bool is_supported(Isa isa);
const KernelTable& table_for(Isa isa);

/// Currently dispatched table.
const KernelTable& active();

/// Overrides dispatch for the rest of the process (tests and benchmarks).
/// Returns false and leaves dispatch unchanged if `isa` is unsupported.
bool set_active(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

/// y = W x, W row-major rows x cols.
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          double* y);

/// dx += W^T delta
void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* delta, double* dx);

/// dW += delta x^T
void outer_acc(const double* delta, std::size_t rows, const double* x,
               std::size_t cols, double* dw);

}  // namespace ctxrec::simd
