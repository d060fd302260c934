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

#include <atomic>
#include <cstdlib>
#include <string>

#include "ctxrec/simd/kernels.hpp"

namespace ctxrec::simd {
namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::dot, &scalar::axpy};
#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::dot, &avx2::axpy};
#endif
#if defined(__aarch64__)
constexpr KernelTable kNeonTable{Isa::kNeon, &neon::dot, &neon::axpy};
#endif

const KernelTable* pick_default() {
  if (const char* env = std::getenv("CTXREC_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &kScalarTable;
    if (want == "avx2" && is_supported(Isa::kAvx2)) return &table_for(Isa::kAvx2);
    if (want == "neon" && is_supported(Isa::kNeon)) return &table_for(Isa::kNeon);
  }
  if (is_supported(Isa::kAvx2)) return &table_for(Isa::kAvx2);
  if (is_supported(Isa::kNeon)) return &table_for(Isa::kNeon);
  return &kScalarTable;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool is_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::kAvx2: return kAvx2Table;
#endif
#if defined(__aarch64__)
    case Isa::kNeon: return kNeonTable;
#endif
    default: return kScalarTable;
  }
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

bool set_active(Isa isa) {
  if (!is_supported(isa)) return false;
  slot().store(&table_for(isa), std::memory_order_relaxed);
  return true;
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          double* y) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) y[r] = k.dot(w + r * cols, x, cols);
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* delta, double* dx) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (delta[r] != 0.0) k.axpy(delta[r], w + r * cols, dx, cols);
  }
}

void outer_acc(const double* delta, std::size_t rows, const double* x,
               std::size_t cols, double* dw) {
  const auto& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (delta[r] != 0.0) k.axpy(delta[r], x, dw + r * cols, cols);
  }
}

}  // namespace ctxrec::simd
