#pragma once

#include "hnl/laplace/band_partition.hpp"

#include <complex>
#include <span>
#include <vector>

namespace hnl::laplace {

/// Per-band real contributions TC_1..TC_m at a list of times.
struct TemporalComponentSet {
    std::vector<double> times;
    std::vector<std::vector<double>> components;  ///< components[band-1][n]
};

/// Cached cos/sin tables for the Fourier-series inverse Laplace transform on a
/// fixed time grid:
///
///   f(t) = e^{γt}/T [ Re f̄(s_0)/2 + Σ_{k=1}^{N} Re{ f̄(s_k) e^{ikπt/T} } ]
///
/// Summation order is fixed: ascending k inside a band, then bands in
/// ascending order, each band scaled by e^{γt}/T before being added. The
/// same order is used by evaluate() and components() so that the temporal
/// components sum bit-for-bit to the reconstruction.
class IltBasis {
public:
    IltBasis(const BandPartition& partition, std::span<const double> times);

    std::size_t size() const noexcept { return times_.size(); }
    std::span<const double> times() const noexcept { return times_; }
    const BandPartition& partition() const noexcept { return partition_; }

    /// TC_band(t_n) written into out (length size()). `coeffs` holds the band's
    /// values in ascending k.
    void component(std::size_t band, std::span<const std::complex<double>> coeffs,
                   std::span<double> out) const;

    /// Sum of TC_1..TC_maxband.
    std::vector<double> evaluate(const CoefficientSet& coeffs, std::size_t max_band) const;

    /// Adjoint of component(): given dL/dTC_band(t_n), writes dL/dRe and dL/dIm
    /// for each coefficient of the band.
    void component_adjoint(std::size_t band, std::span<const double> grad_out,
                           std::span<double> grad_re, std::span<double> grad_im) const;

private:
    const double* cos_row(int k) const { return cos_.data() + static_cast<std::size_t>(k) * times_.size(); }
    const double* sin_row(int k) const { return sin_.data() + static_cast<std::size_t>(k) * times_.size(); }

    BandPartition partition_;
    std::vector<double> times_;
    std::vector<double> scale_;  ///< e^{γ t_n} / T
    std::vector<double> cos_;    ///< (N+1) x n, row k = cos(kπt/T)
    std::vector<double> sin_;
};

/// Reconstruction using bands 1..max_band. Times must lie in [0, 2T).
std::vector<double> ilt_evaluate(const CoefficientSet& coeffs, std::size_t max_band,
                                 std::span<const double> times, const BandPartition& partition);

TemporalComponentSet temporal_components(const CoefficientSet& coeffs,
                                         std::span<const double> times,
                                         const BandPartition& partition);

struct ForwardLaplaceResult {
    std::complex<double> value;
    /// Re(s) <= 0 and the integrand has not decayed by the end of the samples:
    /// the truncated integral is not an approximation of the transform.
    bool non_decaying = false;
};

/// Trapezoid approximation of ∫_0^{t_max} e^{-st} f(t) dt on uniform samples.
/// Test oracle only; the truncation error is |∫_{t_max}^∞ e^{-st} f(t) dt|.
ForwardLaplaceResult numeric_forward_laplace(std::span<const double> times,
                                             std::span<const double> values,
                                             std::complex<double> s);

}  // namespace hnl::laplace
