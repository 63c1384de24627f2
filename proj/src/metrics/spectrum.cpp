#include "hnl/metrics/spectrum.hpp"

#include "hnl/core/error.hpp"

#include <cmath>
#include <numbers>

namespace hnl::metrics {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw ValidationError("radix-2 FFT needs a power-of-two length");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                // twiddles computed directly rather than by recurrence
                const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) /
                                   static_cast<double>(len);
                const std::complex<double> w(std::cos(ang), std::sin(ang));
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + half] * w;
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
}

std::vector<std::complex<double>> dft_direct(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            // reduce k*t mod n so the angle stays small and exact
            const std::size_t kt = (k * t) % n;
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(kt) /
                               static_cast<double>(n);
            re += x[t] * std::cos(ang);
            im += x[t] * std::sin(ang);
        }
        out[k] = {re, im};
    }
    return out;
}

std::vector<std::complex<double>> dft_half(std::span<const double> x) {
    if (!is_power_of_two(x.size())) return dft_direct(x);
    std::vector<std::complex<double>> a(x.begin(), x.end());
    fft_radix2(a);
    a.resize(x.size() / 2 + 1);
    return a;
}

Spectrum dft_amplitudes(std::span<const double> series, double resolution) {
    const std::size_t n = series.size();
    if (n < 2) throw ValidationError("spectrum needs at least 2 samples");
    if (!(resolution > 0.0)) throw ValidationError("resolution must be positive");
    for (double v : series) {
        if (!std::isfinite(v)) throw ValidationError("non-finite sample in spectrum input");
    }
    const auto X = dft_half(series);
    Spectrum s;
    s.frequencies.resize(X.size());
    s.amplitudes.resize(X.size());
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k < X.size(); ++k) {
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        s.amplitudes[k] = std::abs(X[k]) * (edge ? 1.0 : 2.0) / dn;
        s.frequencies[k] = static_cast<double>(k) * resolution / dn;
    }
    return s;
}

}  // namespace hnl::metrics
