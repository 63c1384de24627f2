#include "hnl/metrics/downsample.hpp"

#include "hnl/core/error.hpp"

#include <cmath>
#include <string>

namespace hnl::metrics {

std::size_t block_ratio(double from_resolution, double to_resolution) {
    if (!(from_resolution > 0.0) || !(to_resolution > 0.0)) {
        throw ValidationError("resolutions must be positive");
    }
    const double ratio = from_resolution / to_resolution;
    const double r = std::round(ratio);
    if (r < 1.0) {
        throw ValidationError("cannot upsample from " + std::to_string(from_resolution) + " to " +
                              std::to_string(to_resolution));
    }
    if (std::abs(ratio - r) > 1e-9 * r) {
        throw ValidationError("resolution ratio " + std::to_string(ratio) + " is not an integer");
    }
    return static_cast<std::size_t>(r);
}

std::vector<double> block_mean(std::span<const double> series, std::size_t r) {
    if (r == 0) throw ValidationError("block length must be positive");
    if (series.size() % r != 0) {
        throw ValidationError("series length " + std::to_string(series.size()) +
                              " is not a multiple of block length " + std::to_string(r));
    }
    if (r == 1) return {series.begin(), series.end()};
    std::vector<double> out(series.size() / r);
    for (std::size_t b = 0; b < out.size(); ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < r; ++i) s += series[b * r + i];
        out[b] = s / static_cast<double>(r);
    }
    return out;
}

std::vector<double> block_downsample(std::span<const double> series, double from_resolution,
                                     double to_resolution) {
    return block_mean(series, block_ratio(from_resolution, to_resolution));
}

}  // namespace hnl::metrics
