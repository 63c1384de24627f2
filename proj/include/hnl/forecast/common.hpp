#pragma once

#include "hnl/data/dataset.hpp"
#include "hnl/metrics/metrics.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hnl::forecast {

/// Layout of the network input built from a window sample: the normalized
/// history followed by each exogenous column over the horizon, block-averaged
/// in blocks of exog_block steps.
struct InputSpec {
    double base_resolution = 12.0;  ///< samples per hour of history and target
    std::size_t history_steps = 288;
    std::size_t horizon_steps = 288;
    std::size_t exog_count = 0;
    std::size_t exog_block = 12;

    std::size_t input_size() const { return history_steps + exog_count * (horizon_steps / exog_block); }
    double horizon_hours() const { return static_cast<double>(horizon_steps) / base_resolution; }
};

/// Input spec for a dataset and a ladder (exogenous features averaged to the
/// coarsest resolution).
InputSpec make_input_spec(const data::AlignedDataset& d, double window_hours, double horizon_hours,
                          double coarsest_resolution);

std::vector<double> build_features(const InputSpec& spec, const data::NormStats& stats,
                                   const data::WindowSample& sample);

/// Normalized target block-averaged to `resolution`.
std::vector<double> normalized_target(const InputSpec& spec, const data::NormStats& stats,
                                      const data::WindowSample& sample, double resolution);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 16;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    std::uint64_t seed = 1;
};

struct EpochRecord {
    std::size_t epoch = 0;   ///< 0 is the untrained model
    double train_loss = 0.0; ///< mean over batches of the epoch (0 at epoch 0)
    double val_mse = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_mse = 0.0;
};

void write_train_log(std::ostream& os, const TrainLog& log);

/// Forecasts for one origin at every ladder resolution plus provenance.
struct ForecastBundle {
    std::int64_t origin_time = 0;
    std::string model;
    std::string coordination = "none";
    std::uint64_t seed = 0;
    metrics::Bundle bundle;
};

/// Ground truth arranged like a bundle: block means of the target.
metrics::Bundle actual_bundle(const data::WindowSample& sample, const std::vector<double>& resolutions,
                              double base_resolution);

/// origin,model,coordination,seed,resolution,v1,v2,...
void write_forecast_csv_header(std::ostream& os);
void write_forecast_csv_rows(std::ostream& os, const ForecastBundle& b);
/// Inverse of the writer: consecutive rows sharing origin, model,
/// coordination and seed form one bundle. Throws ValidationError with the line number.
std::vector<ForecastBundle> read_forecast_csv(std::istream& in);

/// Persistence: the last observed value for every lead time.
std::vector<double> predict_persistence(std::span<const double> history, std::size_t length);
ForecastBundle persistence_bundle(const data::WindowSample& sample, const std::vector<double>& resolutions,
                                  double horizon_hours);

nlohmann::json to_json(const InputSpec& s);
InputSpec input_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const data::NormStats& s);
data::NormStats stats_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace hnl::forecast
