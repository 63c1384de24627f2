#include "hnl/simd/kernels.hpp"

namespace hnl::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rotate_accumulate_scalar(double re, double im, const double* c, const double* s,
                              double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += re * c[i] - im * s[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::scalar, dot_scalar, axpy_scalar,
                                   rotate_accumulate_scalar};
    return table;
}

}  // namespace hnl::simd
