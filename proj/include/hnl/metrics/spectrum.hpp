#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hnl::metrics {

/// One-sided amplitude spectrum. frequencies are in cycles per time unit of
/// the sampling resolution passed to dft_amplitudes.
struct Spectrum {
    std::vector<double> frequencies;
    std::vector<double> amplitudes;
};

bool is_power_of_two(std::size_t n);

/// In-place iterative radix-2 transform (forward, no scaling). n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

/// O(n^2) reference transform, bins 0..n/2.
std::vector<std::complex<double>> dft_direct(std::span<const double> series);

/// Bins 0..n/2: radix-2 path for powers of two, direct DFT otherwise.
std::vector<std::complex<double>> dft_half(std::span<const double> series);

/// Amplitudes |X_k| scaled 1/n for DC and Nyquist (even n), 2/n elsewhere, so a
/// sinusoid of amplitude A on an exact bin reads A. M = floor(n/2) + 1 bins.
Spectrum dft_amplitudes(std::span<const double> series, double resolution = 1.0);

}  // namespace hnl::metrics
