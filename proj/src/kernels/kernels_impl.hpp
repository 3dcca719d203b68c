// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace swrls::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scale_scalar(double alpha, double* x, std::size_t n);

#if defined(SWRLS_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
#endif

}  // namespace swrls::kernels::detail
