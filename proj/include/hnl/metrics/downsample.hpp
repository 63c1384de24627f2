#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hnl::metrics {

/// Integer block length r = from / to. Throws unless the ratio is an integer
/// >= 1 (within 1e-9).
std::size_t block_ratio(double from_resolution, double to_resolution);

/// Non-overlapping block means of length r. Series length must be a multiple of r.
std::vector<double> block_mean(std::span<const double> series, std::size_t r);

/// ds(.) : series sampled at from_resolution averaged down to to_resolution.
std::vector<double> block_downsample(std::span<const double> series, double from_resolution,
                                     double to_resolution);

}  // namespace hnl::metrics
