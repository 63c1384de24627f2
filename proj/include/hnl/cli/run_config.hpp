#pragma once

#include "hnl/data/dataset.hpp"
#include "hnl/data/series.hpp"
#include "hnl/data/synthetic.hpp"
#include "hnl/dispatch/system.hpp"
#include "hnl/forecast/common.hpp"
#include "hnl/forecast/hnl_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hnl::cli {

inline constexpr const char* kRunSchema = "hnl.run/1";

/// One target series. Synthetic series are regenerated from their spec on
/// every command, CSV series are read from disk.
struct DatasetConfig {
    std::string name;
    std::string source = "synthetic";  ///< synthetic | csv
    data::EnergySpec synthetic;
    std::filesystem::path path;
    data::CsvSchema schema;
};

enum class ModelKind { hnl, nl, direct, persistence };
const char* kind_name(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct ModelConfig {
    std::string name;
    ModelKind kind = ModelKind::hnl;
    forecast::HnlConfig hnl;             ///< hnl and nl (resolutions filled from the ladder)
    int nl_frequency = 33;               ///< nl: N of each per-resolution decoder
    std::vector<std::size_t> hidden{64, 64};  ///< direct
    forecast::TrainConfig train;

    bool trained() const { return kind != ModelKind::persistence; }
};

struct ScheduleConfig {
    std::size_t max_days = 0;  ///< test days per run; 0 = all
    std::vector<std::string> coordinations{"none"};
    std::vector<double> penetration{0.2, 0.5, 0.8};
    std::string load_dataset = "load";
    std::string wind_dataset = "wind";  ///< empty: skip the integrated pipeline
    double window_hours = 4.0;
};

struct ToyConfig {
    double T = 10.0;
    double resolution = 20.0;       ///< samples per time unit
    double history_units = 8.0;
    std::size_t train_windows = 32;
    std::size_t val_windows = 4;
    double noise_std = 0.05;
    std::vector<int> frequencies{33, 161};
    std::size_t d_h = 8;
    std::vector<std::size_t> encoder_hidden{16};
    std::vector<std::size_t> decoder_hidden{64, 64};
    forecast::TrainConfig train{3e-3, 2, 400, 400, 1};
    // single large decoder on the energy data
    bool large_decoder = true;
    int large_days = 60;
    forecast::TrainConfig large_train{3e-3, 16, 200, 20, 1};
};

struct RunConfig {
    std::string experiment = "experiment";
    std::vector<DatasetConfig> datasets;
    std::vector<double> ladder{1.0, 4.0, 12.0};
    double window_hours = 24.0;
    double horizon_hours = 24.0;
    double stride_hours = 24.0;
    data::SplitFractions split;
    std::vector<ModelConfig> models;
    std::vector<std::string> reconciliation{"none", "bu", "opt"};
    std::string opt_weighting = "identity";
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path system_path;  ///< empty: built-in system
    dispatch::SystemSpec system;
    std::filesystem::path output;
    ScheduleConfig schedule;
    ToyConfig toy;

    const DatasetConfig& dataset(const std::string& name) const;
    const ModelConfig& model(const std::string& name) const;
    bool has_dataset(const std::string& name) const;
};

/// Strict parse: unknown keys, wrong types and inconsistent values throw
/// ConfigError naming the field. Relative paths resolve against base_dir.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// "1,2,3" -> {1, 2, 3}; throws ConfigError.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Raw series of a dataset, regenerated or loaded.
data::RawSeries load_dataset(const DatasetConfig& d);

}  // namespace hnl::cli
