#pragma once

// Data-parallel inner loops shared by the network, the inverse Laplace
// evaluator and the spectral code. Every kernel has a portable scalar
// reference; vector variants are selected once at runtime and must agree with
// the reference to rounding (they may use fused multiply-add).

#include <cstddef>
#include <string_view>

namespace hnl::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
    Isa isa;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// acc[i] += re * c[i] - im * s[i]  (real part of (re + i im)(c + i s))
    void (*rotate_accumulate)(double re, double im, const double* c, const double* s,
                              double* acc, std::size_t n);
};

const KernelTable& scalar_kernels();
/// Null when the ISA was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// The table in use. Chosen on first call from CPU features; the environment
/// variable HNL_SIMD=scalar|avx2|neon|auto overrides the choice.
const KernelTable& kernels();

/// Pin the active table (tests and reproducibility runs). Returns false if the
/// requested ISA is unavailable on this machine.
bool force_isa(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace hnl::simd
