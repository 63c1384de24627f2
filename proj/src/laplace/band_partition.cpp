#include "hnl/laplace/band_partition.hpp"

#include "hnl/core/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hnl::laplace {

int BandPartition::band_first(std::size_t band) const {
    if (band < 1 || band > anchors.size()) {
        throw ValidationError("band index " + std::to_string(band) + " outside 1.." +
                              std::to_string(anchors.size()));
    }
    return band == 1 ? 0 : anchors[band - 2] + 1;
}

int BandPartition::band_last(std::size_t band) const {
    if (band < 1 || band > anchors.size()) {
        throw ValidationError("band index " + std::to_string(band) + " outside 1.." +
                              std::to_string(anchors.size()));
    }
    return anchors[band - 1];
}

std::size_t BandPartition::band_size(std::size_t band) const {
    return static_cast<std::size_t>(band_last(band) - band_first(band) + 1);
}

int BandPartition::resolution_index(double resolution) const {
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
        if (std::abs(resolutions[i] - resolution) <= 1e-9 * std::max(1.0, resolution)) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

BandPartition build_band_partition(std::span<const double> resolutions, double horizon_T,
                                   double gamma, bool strict) {
    if (resolutions.empty()) throw ValidationError("resolution ladder is empty");
    if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) {
        throw ValidationError("horizon T must be positive");
    }
    if (!std::isfinite(gamma)) throw ValidationError("gamma must be finite");

    BandPartition p;
    p.horizon_T = horizon_T;
    p.gamma = gamma;
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
        const double r = resolutions[i];
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw ValidationError("resolution " + std::to_string(i) + " is not positive");
        }
        if (i > 0 && !(r > resolutions[i - 1])) {
            throw ValidationError("resolutions must be strictly ascending");
        }
        const double product = horizon_T * r;
        const double rounded = std::round(product);
        if (strict && std::abs(product - rounded) > 1e-9) {
            throw ValidationError("T * f_r = " + std::to_string(product) +
                                  " is not an integer (strict anchors)");
        }
        const int anchor = static_cast<int>(rounded);
        if (anchor < 1 || (!p.anchors.empty() && anchor <= p.anchors.back())) {
            throw ValidationError("anchors must be positive and strictly ascending");
        }
        p.resolutions.push_back(r);
        p.anchors.push_back(anchor);
    }
    return p;
}

BandPartition custom_partition(double horizon_T, double gamma, std::vector<int> anchors,
                               std::vector<double> resolutions) {
    if (anchors.empty()) throw ValidationError("anchor list is empty");
    if (!(horizon_T > 0.0)) throw ValidationError("horizon T must be positive");
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i] < 1 || (i > 0 && anchors[i] <= anchors[i - 1])) {
            throw ValidationError("anchors must be positive and strictly ascending");
        }
    }
    if (!resolutions.empty() && resolutions.size() != anchors.size()) {
        throw ValidationError("resolution and anchor lists differ in length");
    }
    for (std::size_t i = 1; i < resolutions.size(); ++i) {
        if (!(resolutions[i] > resolutions[i - 1])) {
            throw ValidationError("resolutions must be strictly ascending");
        }
    }
    BandPartition p;
    p.horizon_T = horizon_T;
    p.gamma = gamma;
    p.anchors = std::move(anchors);
    p.resolutions = std::move(resolutions);
    p.shannon_anchored = false;
    return p;
}

SGrid make_s_grid(const BandPartition& partition, std::size_t band) {
    SGrid grid;
    grid.band = band;
    const int first = partition.band_first(band);
    const int last = partition.band_last(band);
    const double step = std::numbers::pi / partition.horizon_T;
    for (int k = first; k <= last; ++k) {
        grid.indices.push_back(k);
        grid.points.emplace_back(partition.gamma, k * step);
    }
    return grid;
}

CoefficientSet zero_coefficients(const BandPartition& partition) {
    CoefficientSet set;
    for (std::size_t b = 1; b <= partition.band_count(); ++b) {
        set.bands.emplace_back(partition.band_size(b));
    }
    return set;
}

double crump_gamma(double alpha_max, double horizon_T, double digits) {
    return alpha_max + digits * std::log(10.0) / (2.0 * horizon_T);
}

}  // namespace hnl::laplace
