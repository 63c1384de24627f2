#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hnl::metrics {

double rmse_time(std::span<const double> forecast, std::span<const double> actual);
/// sqrt(mean over the M one-sided bins of squared amplitude differences).
double rmse_freq(std::span<const double> forecast, std::span<const double> actual);

/// (1/n_i) * ||ds(high) - low||^2, n_i = low.size(). Resolutions are in
/// samples per unit time.
double mce(std::span<const double> low, double low_resolution, std::span<const double> high,
           double high_resolution);

/// One forecast per ladder level, coarsest first.
struct Bundle {
    std::vector<double> resolutions;
    std::vector<std::vector<double>> levels;
};

/// Level j of the bundle averaged down to level i (i < j), one adjacent
/// ladder step at a time. Block means compose exactly in real arithmetic; the
/// fixed chain makes them compose exactly in floating point too, so a
/// coherent bundle measures zero.
std::vector<double> ladder_downsample(const Bundle& bundle, std::size_t from_level, std::size_t to_level);

/// MCE between levels i < j with the ladder-chained downsampler.
double bundle_mce(const Bundle& bundle, std::size_t i, std::size_t j);

/// Sum of MCE over every pair i < j.
double tce(const Bundle& bundle);

double mean(std::span<const double> xs);
double stddev(std::span<const double> xs);

/// Dataset-averaged metrics for one model over a test set.
struct MetricsReport {
    std::string model;
    std::string coordination;
    std::vector<double> resolutions;
    std::vector<double> rmse_time;  ///< per resolution
    double rmse_freq = 0.0;         ///< highest resolution
    std::vector<double> mce;        ///< pairs (0,1), (0,2), ..., (m-2,m-1)
    double tce = 0.0;
    std::size_t samples = 0;
};

/// forecasts[s] and actuals[s] are bundles for test sample s. Actuals hold
/// each level's ground truth (block means of the finest series).
MetricsReport evaluate_bundles(const std::string& model, const std::string& coordination,
                               const std::vector<Bundle>& forecasts,
                               const std::vector<Bundle>& actuals);

/// key = value lines.
void write_report_kv(std::ostream& os, const MetricsReport& r);
/// header: model,coordination,resolution,rmse_time,rmse_freq,tce,samples
void write_report_csv_header(std::ostream& os);
void write_report_csv_rows(std::ostream& os, const MetricsReport& r);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace hnl::metrics
