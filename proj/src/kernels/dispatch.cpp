// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"
#include "swrls/kernels.hpp"

namespace swrls::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &detail::dot_scalar, &detail::axpy_scalar,
                              &detail::scale_scalar};

#if defined(SWRLS_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &detail::dot_avx2, &detail::axpy_avx2,
                            &detail::scale_avx2};
#endif

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
      return avx2_table();
  }
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("SWRLS_ISA")) {
    const std::string want{env};
    if (want == "scalar") return &kScalar;
    if (want == "avx2" && cpu_supports(Isa::avx2)) return avx2_table();
  }
  if (cpu_supports(Isa::avx2)) return avx2_table();
  return &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(SWRLS_HAVE_AVX2)
  return &kAvx2;
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SWRLS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
  const KernelTable* table = table_for(isa);
  if (table == nullptr || !cpu_supports(isa)) {
    throw std::invalid_argument("kernel variant '" + std::string{name(isa)} +
                                "' is not available on this machine");
  }
  current().store(table, std::memory_order_release);
}

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace swrls::kernels
