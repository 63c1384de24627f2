#include "hnl/forecast/common.hpp"

#include "hnl/core/error.hpp"
#include "hnl/metrics/downsample.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace hnl::forecast {

using metrics::format_double;

InputSpec make_input_spec(const data::AlignedDataset& d, double window_hours, double horizon_hours,
                          double coarsest_resolution) {
    InputSpec s;
    s.base_resolution = d.series.resolution;
    s.history_steps = static_cast<std::size_t>(std::llround(window_hours * s.base_resolution));
    s.horizon_steps = static_cast<std::size_t>(std::llround(horizon_hours * s.base_resolution));
    s.exog_count = d.series.exog_count();
    s.exog_block = metrics::block_ratio(s.base_resolution, coarsest_resolution);
    if (s.history_steps == 0 || s.horizon_steps == 0 || s.horizon_steps % s.exog_block != 0) {
        throw ValidationError("window and horizon must be positive whole numbers of coarse steps");
    }
    return s;
}

std::vector<double> build_features(const InputSpec& spec, const data::NormStats& stats,
                                   const data::WindowSample& sample) {
    if (sample.history.size() != spec.history_steps) {
        throw ValidationError("history has " + std::to_string(sample.history.size()) + " steps, model expects " +
                              std::to_string(spec.history_steps));
    }
    if (sample.exog.cols() != spec.exog_count ||
        (spec.exog_count > 0 && sample.exog.rows() != spec.horizon_steps)) {
        throw ValidationError("exogenous block does not match the model input spec");
    }
    std::vector<double> x;
    x.reserve(spec.input_size());
    for (double v : sample.history) x.push_back(stats.normalize(v));
    const std::size_t blocks = spec.horizon_steps / spec.exog_block;
    for (std::size_t e = 0; e < spec.exog_count; ++e) {
        for (std::size_t b = 0; b < blocks; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < spec.exog_block; ++k) s += sample.exog(b * spec.exog_block + k, e);
            x.push_back(stats.normalize_exog(e, s / static_cast<double>(spec.exog_block)));
        }
    }
    return x;
}

std::vector<double> normalized_target(const InputSpec& spec, const data::NormStats& stats,
                                      const data::WindowSample& sample, double resolution) {
    if (sample.target.size() != spec.horizon_steps) throw ValidationError("target length mismatch");
    std::vector<double> y = metrics::block_downsample(sample.target, spec.base_resolution, resolution);
    for (double& v : y) v = stats.normalize(v);
    return y;
}

void write_train_log(std::ostream& os, const TrainLog& log) {
    os << "epoch,train_loss,val_mse\n";
    for (const auto& e : log.epochs) {
        os << e.epoch << "," << format_double(e.train_loss) << "," << format_double(e.val_mse) << "\n";
    }
}

metrics::Bundle actual_bundle(const data::WindowSample& sample, const std::vector<double>& resolutions,
                              double base_resolution) {
    metrics::Bundle b;
    b.resolutions = resolutions;
    for (double r : resolutions) b.levels.push_back(metrics::block_downsample(sample.target, base_resolution, r));
    return b;
}

void write_forecast_csv_header(std::ostream& os) { os << "origin,model,coordination,seed,resolution,values\n"; }

void write_forecast_csv_rows(std::ostream& os, const ForecastBundle& b) {
    for (std::size_t i = 0; i < b.bundle.levels.size(); ++i) {
        os << data::format_iso8601(b.origin_time) << "," << b.model << "," << b.coordination << "," << b.seed << ","
           << format_double(b.bundle.resolutions[i]);
        for (double v : b.bundle.levels[i]) os << "," << format_double(v);
        os << "\n";
    }
}

std::vector<ForecastBundle> read_forecast_csv(std::istream& in) {
    std::vector<ForecastBundle> out;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ValidationError("forecast csv line " + std::to_string(lineno) + ": " + what);
    };
    auto number = [&](const std::string& cell) {
        double v = 0.0;
        const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) fail("unparsable number '" + cell + "'");
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line != "origin,model,coordination,seed,resolution,values") fail("unexpected header");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() < 6) fail("expected at least 6 cells");
        const auto origin = data::parse_iso8601(cells[0]);
        const auto seed_v = number(cells[3]);
        if (seed_v < 0.0 || seed_v != std::floor(seed_v)) fail("seed is not a non-negative integer");
        const auto seed = static_cast<std::uint64_t>(seed_v);
        const bool same = !out.empty() && out.back().origin_time == origin && out.back().model == cells[1] &&
                          out.back().coordination == cells[2] && out.back().seed == seed;
        if (!same) {
            ForecastBundle b;
            b.origin_time = origin;
            b.model = cells[1];
            b.coordination = cells[2];
            b.seed = seed;
            out.push_back(std::move(b));
        }
        auto& b = out.back().bundle;
        b.resolutions.push_back(number(cells[4]));
        std::vector<double> values;
        for (std::size_t i = 5; i < cells.size(); ++i) values.push_back(number(cells[i]));
        b.levels.push_back(std::move(values));
    }
    if (lineno == 0) throw ValidationError("forecast csv is empty");
    return out;
}

std::vector<double> predict_persistence(std::span<const double> history, std::size_t length) {
    if (history.empty()) throw ValidationError("persistence needs a non-empty history");
    return std::vector<double>(length, history.back());
}

ForecastBundle persistence_bundle(const data::WindowSample& sample, const std::vector<double>& resolutions,
                                  double horizon_hours) {
    ForecastBundle fb;
    fb.origin_time = sample.origin_time;
    fb.model = "persistence";
    fb.bundle.resolutions = resolutions;
    for (double r : resolutions) {
        fb.bundle.levels.push_back(
            predict_persistence(sample.history, static_cast<std::size_t>(std::llround(r * horizon_hours))));
    }
    return fb;
}

nlohmann::json to_json(const InputSpec& s) {
    return {{"base_resolution", s.base_resolution}, {"history_steps", s.history_steps},
            {"horizon_steps", s.horizon_steps},     {"exog_count", s.exog_count},
            {"exog_block", s.exog_block}};
}

InputSpec input_spec_from_json(const nlohmann::json& j) {
    InputSpec s;
    s.base_resolution = j.at("base_resolution").get<double>();
    s.history_steps = j.at("history_steps").get<std::size_t>();
    s.horizon_steps = j.at("horizon_steps").get<std::size_t>();
    s.exog_count = j.at("exog_count").get<std::size_t>();
    s.exog_block = j.at("exog_block").get<std::size_t>();
    return s;
}

nlohmann::json to_json(const data::NormStats& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"exog_mean", s.exog_mean}, {"exog_std", s.exog_std}};
}

data::NormStats stats_from_json(const nlohmann::json& j) {
    data::NormStats s;
    s.mean = j.at("mean").get<double>();
    s.std = j.at("std").get<double>();
    s.exog_mean = j.at("exog_mean").get<std::vector<double>>();
    s.exog_std = j.at("exog_std").get<std::vector<double>>();
    return s;
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"max_epochs", c.max_epochs},
            {"patience", c.patience},           {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace hnl::forecast
