#pragma once

#include "hnl/cli/artifacts.hpp"
#include "hnl/cli/run_config.hpp"
#include "hnl/metrics/spectrum.hpp"

#include <string>
#include <vector>

namespace hnl::cli {

/// Windows and input layout of one dataset, rebuilt identically by every command.
struct PreparedData {
    data::AlignedDataset dataset;
    std::vector<data::WindowSample> train, val, test;
    forecast::InputSpec spec;
};

/// Loads the series, resamples it to the finest ladder resolution when it is
/// finer, splits it and enumerates windows.
PreparedData prepare_data(const RunConfig& config, const DatasetConfig& dataset);

/// checkpoints/<dataset>/<model>/seed<k>.json and a training log per network.
void cmd_train(const RunConfig& config, const std::string& config_bytes, OutputDir& out);

/// Test-set forecasts for every (dataset, model, coordination, seed), the
/// per-seed metric table, the across-seed summary and a text report.
void cmd_evaluate(const RunConfig& config, const std::string& config_bytes, OutputDir& out);

/// Day-ahead + real-time costs per model, seed, resolution and test day for
/// the load dataset, then the integrated wind pipeline with its load-model x
/// wind-model matrix at each penetration level. Reads evaluate's forecasts.
void cmd_schedule(const RunConfig& config, const std::string& config_bytes, OutputDir& out);

/// Frequency-filter toy and the single-large-decoder diagnostic.
void cmd_toy(const RunConfig& config, const std::string& config_bytes, OutputDir& out);

struct ToyResult {
    int frequency = 0;
    double cutoff = 0.0;            ///< N / 2T, cycles per time unit
    double amplitude_12 = 0.0;      ///< least-squares amplitude of the omega = 12 sinusoid in the forecast
    double amplitude_1 = 0.0;
    double amplitude_2 = 0.0;
    double best_val_mse = 0.0;
    std::vector<double> times, forecast, truth;  ///< noiseless test window
    metrics::Spectrum spectrum, truth_spectrum;
};

/// Trains a single-decoder model with frequency parameter N on the toy signal
/// sin t + sin 2t + 0.5 sin 12t and measures what survives of each component.
ToyResult run_toy(const ToyConfig& config, int frequency);

/// Least-squares amplitudes of sin/cos pairs at the given angular frequencies
/// (plus a constant) fitted to samples y(t).
std::vector<double> sinusoid_amplitudes(const std::vector<double>& t, const std::vector<double>& y,
                                        const std::vector<double>& omegas);

}  // namespace hnl::cli
