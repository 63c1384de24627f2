#include "hnl/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#include <cmath>
#define HNL_HAVE_NEON_TU 1
#endif

namespace hnl::simd {

#ifdef HNL_HAVE_NEON_TU
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum = std::fma(a[i], b[i], sum);
    return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void rotate_accumulate_neon(double re, double im, const double* c, const double* s,
                            double* acc, std::size_t n) {
    const float64x2_t vre = vdupq_n_f64(re);
    const float64x2_t vim = vdupq_n_f64(im);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vfmaq_f64(vld1q_f64(acc + i), vre, vld1q_f64(c + i));
        vst1q_f64(acc + i, vfmsq_f64(v, vim, vld1q_f64(s + i)));
    }
    for (; i < n; ++i) acc[i] = std::fma(-im, s[i], std::fma(re, c[i], acc[i]));
}

}  // namespace

const KernelTable* neon_kernels() {
    static const KernelTable table{Isa::neon, dot_neon, axpy_neon, rotate_accumulate_neon};
    return &table;
}
#else
const KernelTable* neon_kernels() { return nullptr; }
#endif

}  // namespace hnl::simd
