#include "hnl/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#include <cmath>
#define HNL_HAVE_AVX2_TU 1
#endif

namespace hnl::simd {

#ifdef HNL_HAVE_AVX2_TU
namespace {

// Compiled for AVX2+FMA via target attributes so the rest of the library keeps
// the baseline ISA; only called after a CPUID check.
__attribute__((target("avx2,fma"))) double dot_avx2(const double* a, const double* b,
                                                    std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double sum = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) sum = std::fma(a[i], b[i], sum);
    return sum;
}

__attribute__((target("avx2,fma"))) void axpy_avx2(double alpha, const double* x, double* y,
                                                   std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

// Tail uses the same fma sequence as the vector body so a lane's result does
// not depend on its position in the array.
__attribute__((target("avx2,fma"))) void rotate_accumulate_avx2(double re, double im,
                                                                const double* c,
                                                                const double* s, double* acc,
                                                                std::size_t n) {
    const __m256d vre = _mm256_set1_pd(re);
    const __m256d vim = _mm256_set1_pd(im);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(acc + i);
        v = _mm256_fmadd_pd(vre, _mm256_loadu_pd(c + i), v);
        v = _mm256_fnmadd_pd(vim, _mm256_loadu_pd(s + i), v);
        _mm256_storeu_pd(acc + i, v);
    }
    for (; i < n; ++i) {
        double v = std::fma(re, c[i], acc[i]);
        acc[i] = std::fma(-im, s[i], v);
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{Isa::avx2, dot_avx2, axpy_avx2, rotate_accumulate_avx2};
    return supported ? &table : nullptr;
}
#else
const KernelTable* avx2_kernels() { return nullptr; }
#endif

}  // namespace hnl::simd
