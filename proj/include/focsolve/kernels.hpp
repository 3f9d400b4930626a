#pragma once

#include <cstddef>
#include <span>

namespace focsolve {

// Dense vector kernels backing the optimizer's inner loops.  Each operation
// has a scalar reference implementation and SIMD variants (AVX2+FMA on
// x86-64, NEON on AArch64); the fastest supported variant is selected once at
// runtime.  SIMD results may differ from the scalar reference by summation
// reassociation only; the variants are equivalence-tested against the
// reference.

// sum_i x_i * y_i
double dot(std::span<const double> x, std::span<const double> y);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// x *= alpha
void scal(double alpha, std::span<double> x);

// max_i |x_i| (0 for an empty span)
double norm_inf(std::span<const double> x);

// Instruction set the kernels dispatched to: "avx2", "neon", or "scalar".
const char* active_isa();

namespace detail {

// Raw implementations, exposed for equivalence tests.
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scal_scalar(double alpha, double* x, std::size_t n);
double norm_inf_scalar(const double* x, std::size_t n);

#if defined(__x86_64__) || defined(__i386__)
bool avx2_available();
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scal_avx2(double alpha, double* x, std::size_t n);
double norm_inf_avx2(const double* x, std::size_t n);
#endif

#if defined(__aarch64__)
double dot_neon(const double* x, const double* y, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
void scal_neon(double alpha, double* x, std::size_t n);
double norm_inf_neon(const double* x, std::size_t n);
#endif

}  // namespace detail

}  // namespace focsolve
