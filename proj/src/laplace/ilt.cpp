#include "hnl/laplace/ilt.hpp"

#include "hnl/core/error.hpp"
#include "hnl/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hnl::laplace {
namespace {

void check_times(std::span<const double> times, double horizon_T) {
    for (double t : times) {
        if (!std::isfinite(t) || t < 0.0 || t >= 2.0 * horizon_T) {
            throw ValidationError("evaluation time " + std::to_string(t) +
                                  " outside the reconstruction period [0, 2T)");
        }
    }
}

void check_band(const BandPartition& p, std::size_t band,
                std::span<const std::complex<double>> coeffs) {
    if (coeffs.size() != p.band_size(band)) {
        throw ValidationError("band " + std::to_string(band) + " expects " +
                              std::to_string(p.band_size(band)) + " coefficients, got " +
                              std::to_string(coeffs.size()));
    }
    for (const auto& c : coeffs) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw ValidationError("non-finite Laplace coefficient in band " +
                                  std::to_string(band));
        }
    }
}

}  // namespace

IltBasis::IltBasis(const BandPartition& partition, std::span<const double> times)
    : partition_(partition), times_(times.begin(), times.end()) {
    if (partition_.band_count() == 0) throw ValidationError("empty band partition");
    check_times(times_, partition_.horizon_T);
    const std::size_t n = times_.size();
    const int max_k = partition_.max_index();
    const double T = partition_.horizon_T;
    scale_.resize(n);
    for (std::size_t i = 0; i < n; ++i) scale_[i] = std::exp(partition_.gamma * times_[i]) / T;
    cos_.resize(static_cast<std::size_t>(max_k + 1) * n);
    sin_.resize(cos_.size());
    for (int k = 0; k <= max_k; ++k) {
        double* c = cos_.data() + static_cast<std::size_t>(k) * n;
        double* s = sin_.data() + static_cast<std::size_t>(k) * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = k * std::numbers::pi * times_[i] / T;
            c[i] = std::cos(phase);
            s[i] = std::sin(phase);
        }
    }
}

void IltBasis::component(std::size_t band, std::span<const std::complex<double>> coeffs,
                         std::span<double> out) const {
    check_band(partition_, band, coeffs);
    if (out.size() != times_.size()) throw ValidationError("output length mismatch");
    const auto& kern = simd::kernels();
    const std::size_t n = times_.size();
    std::fill(out.begin(), out.end(), 0.0);
    int k = partition_.band_first(band);
    for (std::size_t j = 0; j < coeffs.size(); ++j, ++k) {
        // the k = 0 term enters with weight 1/2
        const double w = (k == 0) ? 0.5 : 1.0;
        kern.rotate_accumulate(w * coeffs[j].real(), w * coeffs[j].imag(), cos_row(k),
                               sin_row(k), out.data(), n);
    }
    for (std::size_t i = 0; i < n; ++i) out[i] *= scale_[i];
}

std::vector<double> IltBasis::evaluate(const CoefficientSet& coeffs, std::size_t max_band) const {
    if (max_band < 1 || max_band > partition_.band_count()) {
        throw ValidationError("max_band " + std::to_string(max_band) + " outside 1.." +
                              std::to_string(partition_.band_count()));
    }
    if (coeffs.bands.size() < max_band) {
        throw ValidationError("coefficient set holds fewer bands than requested");
    }
    std::vector<double> total(times_.size(), 0.0);
    std::vector<double> tc(times_.size());
    for (std::size_t b = 1; b <= max_band; ++b) {
        component(b, coeffs.bands[b - 1], tc);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += tc[i];
    }
    return total;
}

void IltBasis::component_adjoint(std::size_t band, std::span<const double> grad_out,
                                 std::span<double> grad_re, std::span<double> grad_im) const {
    const std::size_t n = times_.size();
    const std::size_t count = partition_.band_size(band);
    if (grad_out.size() != n || grad_re.size() != count || grad_im.size() != count) {
        throw ValidationError("adjoint buffer size mismatch");
    }
    const auto& kern = simd::kernels();
    std::vector<double> weighted(n);
    for (std::size_t i = 0; i < n; ++i) weighted[i] = grad_out[i] * scale_[i];
    int k = partition_.band_first(band);
    for (std::size_t j = 0; j < count; ++j, ++k) {
        const double w = (k == 0) ? 0.5 : 1.0;
        grad_re[j] = w * kern.dot(weighted.data(), cos_row(k), n);
        grad_im[j] = -w * kern.dot(weighted.data(), sin_row(k), n);
    }
}

std::vector<double> ilt_evaluate(const CoefficientSet& coeffs, std::size_t max_band,
                                 std::span<const double> times, const BandPartition& partition) {
    const IltBasis basis(partition, times);
    return basis.evaluate(coeffs, max_band);
}

TemporalComponentSet temporal_components(const CoefficientSet& coeffs,
                                         std::span<const double> times,
                                         const BandPartition& partition) {
    const IltBasis basis(partition, times);
    if (coeffs.bands.size() != partition.band_count()) {
        throw ValidationError("coefficient set does not cover every band");
    }
    TemporalComponentSet set;
    set.times.assign(times.begin(), times.end());
    for (std::size_t b = 1; b <= partition.band_count(); ++b) {
        std::vector<double> tc(times.size());
        basis.component(b, coeffs.bands[b - 1], tc);
        set.components.push_back(std::move(tc));
    }
    return set;
}

ForwardLaplaceResult numeric_forward_laplace(std::span<const double> times,
                                             std::span<const double> values,
                                             std::complex<double> s) {
    if (times.size() != values.size() || times.size() < 2) {
        throw ValidationError("forward Laplace needs >= 2 paired samples");
    }
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw ValidationError("sample times must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (std::abs((times[i] - times[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw ValidationError("sample spacing is not uniform");
        }
    }
    std::complex<double> sum{0.0, 0.0};
    double peak = 0.0;
    double tail = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::complex<double> term = std::exp(-s * times[i]) * values[i];
        const double w = (i == 0 || i + 1 == times.size()) ? 0.5 : 1.0;
        sum += w * term;
        peak = std::max(peak, std::abs(term));
        if (i + 1 == times.size()) tail = std::abs(term);
    }
    ForwardLaplaceResult result;
    result.value = sum * h;
    result.non_decaying = s.real() <= 0.0 && tail > 1e-6 * std::max(peak, 1e-300);
    return result;
}

}  // namespace hnl::laplace
