#pragma once

#include "hnl/core/matrix.hpp"
#include "hnl/data/series.hpp"

#include <cstddef>
#include <vector>

namespace hnl::data {

/// z-score statistics computed on the training range only.
struct NormStats {
    double mean = 0.0;
    double std = 1.0;
    std::vector<double> exog_mean;
    std::vector<double> exog_std;

    double normalize(double v) const { return (v - mean) / std; }
    double denormalize(double z) const { return z * std + mean; }
    double normalize_exog(std::size_t col, double v) const { return (v - exog_mean[col]) / exog_std[col]; }
};

struct SplitFractions {
    double train = 0.7;
    double val = 0.1;  ///< test gets the remainder
};

enum class Split { train, val, test };
const char* split_name(Split s);

/// Chronological split of a series. Ranges are [0, train_end), [train_end,
/// val_end), [val_end, size).
struct AlignedDataset {
    RawSeries series;
    std::size_t train_end = 0;
    std::size_t val_end = 0;
    NormStats stats;

    std::size_t split_begin(Split s) const;
    std::size_t split_end(Split s) const;
};

/// Split boundaries are rounded down to whole days so forecast origins stay at
/// midnight. Fractions must be positive and sum to < 1 (test gets the rest);
/// train = 1, val = 0 puts everything in one training split.
AlignedDataset align_dataset(RawSeries series, SplitFractions fractions = {});

NormStats compute_stats(const RawSeries& series, std::size_t begin, std::size_t end);

/// One forecast origin. history covers the window before the origin, target
/// and exog the horizon after it, all at the series resolution.
struct WindowSample {
    std::size_t origin = 0;  ///< index of the first target step
    std::int64_t origin_time = 0;
    Split split = Split::train;
    std::vector<double> history;
    Matrix exog;  ///< horizon steps x exog columns
    std::vector<double> target;
};

/// Origins at window, window + stride, ... (in steps). A sample is kept only
/// when [origin - window, origin + horizon) lies inside one split.
std::vector<WindowSample> build_windows(const AlignedDataset& dataset, double window_hours,
                                        double horizon_hours, double stride_hours);

std::vector<WindowSample> select_split(const std::vector<WindowSample>& samples, Split split);

}  // namespace hnl::data
