// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops used by the dense linear algebra and the
// information-matrix assembly. Every kernel has a scalar reference
// implementation; wider variants are compiled separately and picked once at
// runtime from the CPU feature bits. SWRLS_ISA=scalar|avx2 in the environment
// overrides the automatic choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace swrls::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled in.
const KernelTable* avx2_table() noexcept;

bool cpu_supports(Isa isa) noexcept;

/// Table in use by the free functions below.
const KernelTable& active() noexcept;

/// Force a variant; throws std::invalid_argument if it is not usable here.
void select(Isa isa);

std::string_view name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline void scale(double alpha, std::span<double> x) noexcept {
  active().scale(alpha, x.data(), x.size());
}

}  // namespace swrls::kernels
