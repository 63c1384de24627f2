#include "hnl/cli/commands.hpp"

#include "hnl/core/error.hpp"
#include "hnl/forecast/direct.hpp"
#include "hnl/forecast/hnl_model.hpp"
#include "hnl/metrics/metrics.hpp"
#include "hnl/reconcile/reconcile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

namespace hnl::cli {
namespace {

using forecast::ForecastBundle;
using metrics::format_double;

std::string checkpoint_path(const std::string& dataset, const std::string& model, std::uint64_t seed) {
    return "checkpoints/" + dataset + "/" + model + "/seed" + std::to_string(seed) + ".json";
}

std::string log_path(const std::string& dataset, const std::string& model, std::uint64_t seed,
                     std::optional<double> resolution = std::nullopt) {
    std::string p = "logs/" + dataset + "/" + model + "/seed" + std::to_string(seed);
    if (resolution) p += "_r" + format_double(*resolution);
    return p + ".csv";
}

std::string forecast_path(const std::string& dataset, const std::string& model, const std::string& coordination,
                          std::uint64_t seed) {
    return "forecasts/" + dataset + "/" + model + "_" + coordination + "_seed" + std::to_string(seed) + ".csv";
}

std::string log_text(const forecast::TrainLog& log) {
    std::ostringstream os;
    forecast::write_train_log(os, log);
    return os.str();
}

forecast::TrainConfig seeded(forecast::TrainConfig c, std::uint64_t seed) {
    c.seed = seed;
    return c;
}

struct Job {
    std::size_t dataset;
    std::size_t model;
    std::uint64_t seed;
};

std::vector<Job> trained_jobs(const RunConfig& config, bool include_untrained) {
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
        for (std::size_t m = 0; m < config.models.size(); ++m) {
            if (!include_untrained && !config.models[m].trained()) continue;
            for (auto s : config.seeds) jobs.push_back({d, m, s});
        }
    }
    return jobs;
}

std::vector<PreparedData> prepare_all(const RunConfig& config) {
    std::vector<PreparedData> out;
    for (const auto& d : config.datasets) out.push_back(prepare_data(config, d));
    return out;
}

void require_models(const RunConfig& config) {
    if (config.datasets.empty()) throw ConfigError("field 'datasets' must name at least one dataset");
    if (config.models.empty()) throw ConfigError("field 'models' must list at least one model");
}

nlohmann::json seeds_json(const RunConfig& c) { return {{"seeds", c.seeds}, {"experiment", c.experiment}}; }

/// Raw (uncoordinated) bundles of one trained model over the test windows.
std::vector<ForecastBundle> model_forecasts(const RunConfig& config, const ModelConfig& model,
                                            const PreparedData& prep, const nlohmann::json* checkpoint,
                                            std::uint64_t seed) {
    std::vector<ForecastBundle> out;
    switch (model.kind) {
        case ModelKind::persistence:
            for (const auto& s : prep.test) out.push_back(forecast::persistence_bundle(s, config.ladder, config.horizon_hours));
            break;
        case ModelKind::hnl: {
            const auto m = forecast::HnlModel::from_json(*checkpoint);
            for (const auto& s : prep.test) out.push_back(m.forecast_bundle(s, model.name));
            break;
        }
        case ModelKind::nl: {
            std::vector<forecast::HnlModel> ms;
            for (const auto& j : checkpoint->at("models")) ms.push_back(forecast::HnlModel::from_json(j));
            if (ms.size() != config.ladder.size()) throw ValidationError("nl checkpoint does not match the ladder");
            for (const auto& s : prep.test) {
                ForecastBundle fb;
                fb.origin_time = s.origin_time;
                for (const auto& m : ms) {
                    const auto one = m.forecast_bundle(s, model.name);
                    fb.bundle.resolutions.push_back(one.bundle.resolutions.at(0));
                    fb.bundle.levels.push_back(one.bundle.levels.at(0));
                }
                out.push_back(std::move(fb));
            }
            break;
        }
        case ModelKind::direct: {
            std::vector<forecast::DirectModel> ms;
            for (const auto& j : checkpoint->at("models")) ms.push_back(forecast::DirectModel::from_json(j));
            if (ms.size() != config.ladder.size()) throw ValidationError("direct checkpoint does not match the ladder");
            for (const auto& s : prep.test) out.push_back(forecast::direct_bundle(ms, s));
            break;
        }
    }
    for (auto& b : out) {
        b.model = model.name;
        b.coordination = "none";
        b.seed = seed;
    }
    return out;
}

struct Row {
    std::string dataset, model, coordination;
    std::uint64_t seed;
    std::string metric, level;
    double value;
};

std::vector<Row> report_rows(const std::string& dataset, std::uint64_t seed, const metrics::MetricsReport& r) {
    std::vector<Row> rows;
    for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
        rows.push_back({dataset, r.model, r.coordination, seed, "rmse_time", format_double(r.resolutions[i]),
                        r.rmse_time[i]});
    }
    rows.push_back({dataset, r.model, r.coordination, seed, "rmse_freq", format_double(r.resolutions.back()),
                    r.rmse_freq});
    std::size_t k = 0;
    for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
        for (std::size_t j = i + 1; j < r.resolutions.size(); ++j) {
            rows.push_back({dataset, r.model, r.coordination, seed, "mce",
                            format_double(r.resolutions[i]) + ":" + format_double(r.resolutions[j]), r.mce[k++]});
        }
    }
    rows.push_back({dataset, r.model, r.coordination, seed, "tce", "all", r.tce});
    return rows;
}

char* fmt(char* buf, std::size_t n, double v) {
    std::snprintf(buf, n, "%.4f", v);
    return buf;
}

}  // namespace

PreparedData prepare_data(const RunConfig& config, const DatasetConfig& dataset) {
    auto series = load_dataset(dataset);
    const double finest = config.ladder.back();
    if (series.resolution < finest - 1e-12) {
        throw ConfigError("dataset '" + dataset.name + "' has resolution " + format_double(series.resolution) +
                          " per hour, coarser than the finest ladder level " + format_double(finest));
    }
    if (std::abs(series.resolution - finest) > 1e-12) series = data::resample(series, finest);
    PreparedData p;
    p.dataset = data::align_dataset(std::move(series), config.split);
    const auto windows = data::build_windows(p.dataset, config.window_hours, config.horizon_hours, config.stride_hours);
    p.train = data::select_split(windows, data::Split::train);
    p.val = data::select_split(windows, data::Split::val);
    p.test = data::select_split(windows, data::Split::test);
    if (p.train.empty() || p.val.empty() || p.test.empty()) {
        throw ConfigError("dataset '" + dataset.name + "' yields " + std::to_string(p.train.size()) + "/" +
                          std::to_string(p.val.size()) + "/" + std::to_string(p.test.size()) +
                          " train/val/test windows; every split needs at least one");
    }
    p.spec = forecast::make_input_spec(p.dataset, config.window_hours, config.horizon_hours, config.ladder.front());
    return p;
}

void cmd_train(const RunConfig& config, const std::string& config_bytes, OutputDir& out) {
    require_models(config);
    const auto prepared = prepare_all(config);
    const auto jobs = trained_jobs(config, false);
    run_jobs(jobs.size(), [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto& ds = config.datasets[job.dataset].name;
        const auto& model = config.models[job.model];
        const auto& prep = prepared[job.dataset];
        const auto tc = seeded(model.train, job.seed);
        nlohmann::json ckpt;
        switch (model.kind) {
            case ModelKind::hnl: {
                forecast::HnlModel m(model.hnl, prep.spec, prep.dataset.stats, job.seed);
                const auto log = forecast::train_hnl(m, prep.train, prep.val, tc);
                out.write(log_path(ds, model.name, job.seed), log_text(log));
                ckpt = m.to_json();
                break;
            }
            case ModelKind::nl: {
                ckpt = {{"kind", "nl_set"}, {"models", nlohmann::json::array()}};
                for (double r : config.ladder) {
                    forecast::HnlModel m(forecast::nl_config(model.hnl, r, model.nl_frequency), prep.spec,
                                         prep.dataset.stats, job.seed);
                    const auto log = forecast::train_hnl(m, prep.train, prep.val, tc);
                    out.write(log_path(ds, model.name, job.seed, r), log_text(log));
                    ckpt["models"].push_back(m.to_json());
                }
                break;
            }
            case ModelKind::direct: {
                ckpt = {{"kind", "direct_set"}, {"models", nlohmann::json::array()}};
                for (double r : config.ladder) {
                    forecast::DirectModel m(r, model.hidden, prep.spec, prep.dataset.stats, job.seed);
                    const auto log = forecast::train_direct(m, prep.train, prep.val, tc);
                    out.write(log_path(ds, model.name, job.seed, r), log_text(log));
                    ckpt["models"].push_back(m.to_json());
                }
                break;
            }
            case ModelKind::persistence:
                return;
        }
        out.write(checkpoint_path(ds, model.name, job.seed), ckpt.dump() + "\n");
    });
    write_manifest(out, "train", config_bytes, seeds_json(config));
}

void cmd_evaluate(const RunConfig& config, const std::string& config_bytes, OutputDir& out) {
    require_models(config);
    const auto prepared = prepare_all(config);
    const auto agg = reconcile::build_aggregation(config.ladder, config.horizon_hours);
    const reconcile::OptReconciler opt(agg, config.opt_weighting == "structural" ? reconcile::Weighting::structural
                                                                                 : reconcile::Weighting::identity);
    std::vector<std::vector<metrics::Bundle>> actuals(config.datasets.size());
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
        std::ostringstream os;
        forecast::write_forecast_csv_header(os);
        for (const auto& s : prepared[d].test) {
            ForecastBundle fb;
            fb.origin_time = s.origin_time;
            fb.model = "actual";
            fb.bundle = forecast::actual_bundle(s, config.ladder, config.ladder.back());
            forecast::write_forecast_csv_rows(os, fb);
            actuals[d].push_back(fb.bundle);
        }
        out.write("forecasts/" + config.datasets[d].name + "/actual.csv", os.str());
    }

    const auto jobs = trained_jobs(config, true);
    std::vector<std::vector<metrics::MetricsReport>> reports(jobs.size());
    run_jobs(jobs.size(), [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto& ds = config.datasets[job.dataset].name;
        const auto& model = config.models[job.model];
        std::optional<nlohmann::json> ckpt;
        if (model.trained()) {
            const auto path = out.path(checkpoint_path(ds, model.name, job.seed));
            if (!std::filesystem::exists(path)) {
                throw std::runtime_error("missing checkpoint " + path.string() + " (run 'train' first)");
            }
            ckpt = nlohmann::json::parse(read_file(path));
        }
        const auto raw = model_forecasts(config, model, prepared[job.dataset], ckpt ? &*ckpt : nullptr, job.seed);
        for (const auto& coord : config.reconciliation) {
            std::vector<ForecastBundle> fbs = raw;
            std::vector<metrics::Bundle> bundles;
            std::ostringstream os;
            forecast::write_forecast_csv_header(os);
            for (auto& fb : fbs) {
                if (coord == "bu") fb.bundle = reconcile::bu_reconcile(fb.bundle);
                if (coord == "opt") fb.bundle = opt.apply(fb.bundle);
                fb.coordination = coord;
                forecast::write_forecast_csv_rows(os, fb);
                bundles.push_back(fb.bundle);
            }
            out.write(forecast_path(ds, model.name, coord, job.seed), os.str());
            reports[i].push_back(metrics::evaluate_bundles(model.name, coord, bundles, actuals[job.dataset]));
        }
    });

    // per-seed long table, then the across-seed summary in first-seen order
    std::vector<Row> rows;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (const auto& r : reports[i]) {
            const auto more = report_rows(config.datasets[jobs[i].dataset].name, jobs[i].seed, r);
            rows.insert(rows.end(), more.begin(), more.end());
        }
    }
    std::ostringstream per_seed;
    per_seed << "dataset,model,coordination,seed,metric,level,value\n";
    for (const auto& r : rows) {
        per_seed << r.dataset << "," << r.model << "," << r.coordination << "," << r.seed << "," << r.metric << ","
                 << r.level << "," << format_double(r.value) << "\n";
    }
    out.write("metrics/per_seed.csv", per_seed.str());

    using Key = std::tuple<std::string, std::string, std::string, std::string, std::string>;
    std::vector<Key> order;
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : rows) {
        Key k{r.dataset, r.model, r.coordination, r.metric, r.level};
        if (!groups.count(k)) order.push_back(k);
        groups[k].push_back(r.value);
    }
    std::ostringstream summary;
    summary << "dataset,model,coordination,metric,level,mean,std,seeds\n";
    for (const auto& k : order) {
        const auto& v = groups[k];
        summary << std::get<0>(k) << "," << std::get<1>(k) << "," << std::get<2>(k) << "," << std::get<3>(k) << ","
                << std::get<4>(k) << "," << format_double(metrics::mean(v)) << ","
                << format_double(metrics::stddev(v)) << "," << v.size() << "\n";
    }
    out.write("metrics/summary.csv", summary.str());

    // text report laid out like the result tables: rows model/coordination, columns levels
    std::ostringstream rep;
    char a[64], b[64];
    for (const auto& d : config.datasets) {
        for (const char* metric : {"rmse_time", "rmse_freq", "mce", "tce"}) {
            rep << "== " << d.name << " " << metric << " (mean +- std over " << config.seeds.size() << " seeds)\n";
            std::vector<std::string> levels;
            for (const auto& k : order) {
                if (std::get<0>(k) == d.name && std::get<3>(k) == metric &&
                    std::find(levels.begin(), levels.end(), std::get<4>(k)) == levels.end()) {
                    levels.push_back(std::get<4>(k));
                }
            }
            rep << "model/coordination";
            for (const auto& l : levels) rep << "\t" << l;
            rep << "\n";
            for (const auto& m : config.models) {
                for (const auto& c : config.reconciliation) {
                    rep << m.name << "/" << c;
                    for (const auto& l : levels) {
                        const auto& v = groups[Key{d.name, m.name, c, metric, l}];
                        rep << "\t" << fmt(a, sizeof a, metrics::mean(v)) << " +- " << fmt(b, sizeof b, metrics::stddev(v));
                    }
                    rep << "\n";
                }
            }
            rep << "\n";
        }
    }
    out.write("metrics/report.txt", rep.str());
    write_manifest(out, "evaluate", config_bytes, seeds_json(config));
}

}  // namespace hnl::cli
