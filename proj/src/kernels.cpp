#include "focsolve/kernels.hpp"

#include <cassert>
#include <cmath>

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace focsolve {

namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double norm_inf_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

#if defined(__aarch64__)

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_neon(double alpha, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
    for (; i < n; ++i) x[i] *= alpha;
}

double norm_inf_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
    double m = vmaxvq_f64(acc);
    for (; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

#endif  // __aarch64__

}  // namespace detail

namespace {

struct Kernels {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    double (*norm_inf)(const double*, std::size_t);
    const char* isa;
};

Kernels select_kernels() {
#if defined(__x86_64__) || defined(__i386__)
    if (detail::avx2_available())
        return {detail::dot_avx2, detail::axpy_avx2, detail::scal_avx2, detail::norm_inf_avx2, "avx2"};
#elif defined(__aarch64__)
    return {detail::dot_neon, detail::axpy_neon, detail::scal_neon, detail::norm_inf_neon, "neon"};
#endif
    return {detail::dot_scalar, detail::axpy_scalar, detail::scal_scalar, detail::norm_inf_scalar,
            "scalar"};
}

const Kernels& kernels() {
    static const Kernels k = select_kernels();
    return k;
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return kernels().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void scal(double alpha, std::span<double> x) { kernels().scal(alpha, x.data(), x.size()); }

double norm_inf(std::span<const double> x) { return kernels().norm_inf(x.data(), x.size()); }

const char* active_isa() { return kernels().isa; }

}  // namespace focsolve
