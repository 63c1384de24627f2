#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hnl::laplace {

/// Splits the Fourier-series s-grid k = 0..N_m into contiguous frequency bands.
///
/// Band i (1-based) owns indices (N_{i-1}, N_i] with N_0 = 0; band 1 also owns
/// the DC index k = 0. For a Shannon-anchored partition N_i = round(T * f_r^i),
/// so band i ends exactly at the Nyquist frequency of resolution f_r^i.
struct BandPartition {
    double horizon_T = 24.0;          ///< period parameter T (hours)
    double gamma = 0.0;               ///< real part of the Bromwich contour (1/hour)
    std::vector<double> resolutions;  ///< samples per hour, strictly ascending
    std::vector<int> anchors;         ///< N_1 < N_2 < ... < N_m
    bool shannon_anchored = true;     ///< anchors derived from T * f_r

    std::size_t band_count() const noexcept { return anchors.size(); }
    /// First k owned by band (1-based).
    int band_first(std::size_t band) const;
    /// Last k owned by band (1-based), i.e. N_band.
    int band_last(std::size_t band) const;
    std::size_t band_size(std::size_t band) const;
    int max_index() const { return anchors.empty() ? 0 : anchors.back(); }
    /// Index of the ladder entry equal to resolution (within 1e-9), or -1.
    int resolution_index(double resolution) const;
};

/// Anchors N_i = round(T * f_r^i). In strict mode a non-integer product
/// (|T f_r - round| > 1e-9) is rejected.
BandPartition build_band_partition(std::span<const double> resolutions, double horizon_T,
                                   double gamma, bool strict = true);

/// Partition with explicit anchors (single-decoder benchmarks, toy runs).
/// `resolutions` may be empty or must match `anchors` in length.
BandPartition custom_partition(double horizon_T, double gamma, std::vector<int> anchors,
                               std::vector<double> resolutions = {});

struct SGrid {
    std::size_t band = 0;
    std::vector<int> indices;
    std::vector<std::complex<double>> points;  ///< s_k = gamma + i k pi / T
};

SGrid make_s_grid(const BandPartition& partition, std::size_t band);

/// Laplace values f̄(s_k) grouped by band; bands[0][0] is f̄(gamma) (k = 0).
struct CoefficientSet {
    std::vector<std::vector<std::complex<double>>> bands;
};

CoefficientSet zero_coefficients(const BandPartition& partition);

/// gamma = alpha_max + ln(10^digits) / (2T): places the aliasing error of the
/// Fourier-series inversion near 10^-digits for functions growing like
/// e^{alpha_max t}.
double crump_gamma(double alpha_max, double horizon_T, double digits = 6.0);

}  // namespace hnl::laplace
