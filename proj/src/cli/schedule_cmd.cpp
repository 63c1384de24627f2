#include "hnl/cli/commands.hpp"

#include "hnl/core/error.hpp"
#include "hnl/dispatch/schedule.hpp"
#include "hnl/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace hnl::cli {
namespace {

using dispatch::ScheduleSolution;
using forecast::ForecastBundle;
using metrics::format_double;

std::vector<ForecastBundle> read_bundles(const OutputDir& out, const std::string& relative) {
    const auto path = out.path(relative);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing forecasts " + path.string() + " (run 'evaluate' first)");
    return forecast::read_forecast_csv(in);
}

std::string forecast_file(const std::string& dataset, const std::string& model, const std::string& coord,
                          std::uint64_t seed) {
    if (model == "perfect") return "forecasts/" + dataset + "/actual.csv";
    return "forecasts/" + dataset + "/" + model + "_" + coord + "_seed" + std::to_string(seed) + ".csv";
}

std::string clean(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

/// Level of a bundle by resolution.
const std::vector<double>& level(const ForecastBundle& b, double resolution) {
    for (std::size_t i = 0; i < b.bundle.resolutions.size(); ++i) {
        if (std::abs(b.bundle.resolutions[i] - resolution) < 1e-12) return b.bundle.levels[i];
    }
    throw std::runtime_error("forecast bundle lacks resolution " + format_double(resolution));
}

std::vector<double> scaled(const std::vector<double>& v, double k) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * k;
    return out;
}

void check_alignment(const std::vector<ForecastBundle>& f, const std::vector<ForecastBundle>& actual,
                     std::size_t days, const std::string& what) {
    if (f.size() < days) throw std::runtime_error(what + " has fewer test days than the actuals");
    for (std::size_t d = 0; d < days; ++d) {
        if (f[d].origin_time != actual[d].origin_time) throw std::runtime_error(what + " is not aligned with the actuals");
    }
}

struct Candidate {
    std::string model, coordination;
    std::uint64_t seed;
};

struct DayRow {
    std::string status = "optimal", message;
    double c_da = 0.0, c_id = 0.0, c_rt = 0.0, curtailment = 0.0, imbalance = 0.0;
    bool fallback = false;
    bool ok() const { return status == "optimal"; }
};

template <typename F>
DayRow guarded(F&& f) {
    DayRow r;
    try {
        f(r);
    } catch (const NumericError& e) {
        r.status = "numeric_error";
        r.message = e.what();
    } catch (const ValidationError& e) {
        r.status = "invalid";
        r.message = e.what();
    }
    return r;
}

std::string cost_cells(const DayRow& r, bool integrated) {
    if (!r.ok()) return integrated ? ",,,,," : ",,,";
    std::string s = "," + format_double(r.c_da);
    if (integrated) s += "," + format_double(r.c_id);
    s += "," + format_double(r.c_rt) + "," + format_double(r.c_rt - r.c_da);
    if (integrated) s += "," + format_double(r.imbalance);
    return s;
}

}  // namespace

void cmd_schedule(const RunConfig& config, const std::string& config_bytes, OutputDir& out) {
    const auto& sc = config.schedule;
    const auto& sys = config.system;
    if (std::abs(sys.horizon_hours - config.horizon_hours) > 1e-12) {
        throw ConfigError("system horizon_hours (" + format_double(sys.horizon_hours) +
                          ") must equal the forecast horizon (" + format_double(config.horizon_hours) + ")");
    }
    const auto& load_ds = config.dataset(sc.load_dataset).name;
    const auto load_actual = read_bundles(out, forecast_file(load_ds, "perfect", "none", 0));
    const std::size_t days = sc.max_days == 0 ? load_actual.size() : std::min(sc.max_days, load_actual.size());

    std::vector<Candidate> cands;
    for (const auto& m : config.models) {
        for (const auto& c : sc.coordinations) {
            for (auto s : config.seeds) cands.push_back({m.name, c, s});
        }
    }
    cands.push_back({"perfect", "none", 0});

    // day-ahead plan on the forecast, real-time settlement on the actual load
    const std::size_t levels = config.ladder.size();
    std::vector<std::vector<DayRow>> da_rows(cands.size());
    run_jobs(cands.size(), [&](std::size_t ci) {
        const auto& c = cands[ci];
        const auto fc = read_bundles(out, forecast_file(load_ds, c.model, c.coordination, c.seed));
        check_alignment(fc, load_actual, days, c.model + " forecasts");
        for (std::size_t l = 0; l < levels; ++l) {
            const double r = config.ladder[l];
            for (std::size_t d = 0; d < days; ++d) {
                da_rows[ci].push_back(guarded([&](DayRow& row) {
                    const auto da = dispatch::day_ahead_schedule(level(fc[d], r), sys);
                    if (!da.ok()) {
                        row.status = dispatch::status_name(da.status);
                        row.message = da.message;
                        return;
                    }
                    const auto rt = dispatch::realtime_settle(da, level(load_actual[d], r), sys);
                    if (!rt.ok()) {
                        row.status = dispatch::status_name(rt.status);
                        row.message = rt.message;
                        return;
                    }
                    row.c_da = da.cost.total;
                    row.c_rt = rt.cost.total;
                    row.imbalance = rt.cost.imbalance;
                    row.fallback = rt.imbalance_fallback;
                    row.message = rt.message;
                }));
            }
        }
    });

    std::ostringstream da_csv, da_sum;
    // additional cost is measured against the perfect-information plan C*_da of
    // the same day and resolution; rt_minus_da against the model's own plan
    const auto& perfect = da_rows.back();
    auto additional = [&](const DayRow& row, std::size_t idx) {
        const auto& p = perfect[idx];
        return p.ok() ? std::optional<double>(row.c_rt - p.c_da) : std::nullopt;
    };
    da_csv << "model,coordination,seed,resolution,origin,status,c_da,c_rt,additional,rt_minus_da,imbalance_fallback,"
              "message\n";
    da_sum << "model,coordination,resolution,days_ok,days_flagged,mean_c_da,mean_c_rt,mean_additional,"
              "std_additional_over_seeds\n";
    using SumKey = std::tuple<std::string, std::string, std::size_t>;
    std::vector<SumKey> order;
    std::map<SumKey, std::map<std::uint64_t, std::vector<std::pair<const DayRow*, std::size_t>>>> groups;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        const auto& c = cands[ci];
        for (std::size_t l = 0; l < levels; ++l) {
            SumKey k{c.model, c.coordination, l};
            if (!groups.count(k)) order.push_back(k);
            for (std::size_t d = 0; d < days; ++d) {
                const std::size_t idx = l * days + d;
                const auto& row = da_rows[ci][idx];
                groups[k][c.seed].emplace_back(&row, idx);
                const auto add = additional(row, idx);
                da_csv << c.model << "," << c.coordination << "," << c.seed << "," << format_double(config.ladder[l])
                       << "," << data::format_iso8601(load_actual[d].origin_time) << "," << row.status
                       << (row.ok() ? "," + format_double(row.c_da) + "," + format_double(row.c_rt) + "," +
                                          (add ? format_double(*add) : std::string()) + "," +
                                          format_double(row.c_rt - row.c_da)
                                    : std::string(",,,,"))
                       << "," << (row.fallback ? 1 : 0) << "," << clean(row.message) << "\n";
            }
        }
    }
    for (const auto& k : order) {
        std::size_t ok = 0, flagged = 0;
        std::vector<double> cda, crt, add, seed_means;
        for (const auto& [seed, rows] : groups[k]) {
            std::vector<double> mine;
            for (const auto& [r, idx] : rows) {
                const auto a = additional(*r, idx);
                if (!r->ok() || !a) {
                    ++flagged;
                    continue;
                }
                ++ok;
                cda.push_back(r->c_da);
                crt.push_back(r->c_rt);
                add.push_back(*a);
                mine.push_back(*a);
            }
            if (!mine.empty()) seed_means.push_back(metrics::mean(mine));
        }
        da_sum << std::get<0>(k) << "," << std::get<1>(k) << "," << format_double(config.ladder[std::get<2>(k)]) << ","
               << ok << "," << flagged;
        if (ok == 0) {
            da_sum << ",,,,\n";
            continue;
        }
        da_sum << "," << format_double(metrics::mean(cda)) << "," << format_double(metrics::mean(crt)) << ","
               << format_double(metrics::mean(add)) << ","
               << format_double(seed_means.size() > 1 ? metrics::stddev(seed_means) : 0.0) << "\n";
    }
    out.write("schedule/day_ahead_costs.csv", da_csv.str());
    out.write("schedule/day_ahead_summary.csv", da_sum.str());

    nlohmann::json extra = {{"seeds", config.seeds}, {"experiment", config.experiment}, {"days", days}};
    if (sc.wind_dataset.empty()) {
        write_manifest(out, "schedule", config_bytes, extra);
        return;
    }

    // integrated pipeline: hourly plan with wind, intra-day battery at the
    // finest level, real-time imbalance against the actuals
    const auto& wind_ds = config.dataset(sc.wind_dataset).name;
    const auto wind_actual = read_bundles(out, forecast_file(wind_ds, "perfect", "none", 0));
    check_alignment(wind_actual, load_actual, days, "wind actuals");
    const double coarse = config.ladder.front(), fine = config.ladder.back();
    double peak_load = 0.0, peak_wind = 0.0;
    for (std::size_t d = 0; d < days; ++d) {
        for (double v : level(load_actual[d], fine)) peak_load = std::max(peak_load, v);
        for (double v : level(wind_actual[d], fine)) peak_wind = std::max(peak_wind, v);
    }
    if (!(peak_wind > 0.0)) throw std::runtime_error("wind actuals are zero on every scheduled day");

    const std::string coord = sc.coordinations.front();
    std::vector<std::string> names;
    for (const auto& m : config.models) names.push_back(m.name);
    names.push_back("perfect");
    struct Pair {
        std::size_t p, lm, wm;
        std::uint64_t seed;
    };
    std::vector<Pair> pairs;
    for (std::size_t p = 0; p < sc.penetration.size(); ++p) {
        for (std::size_t lm = 0; lm < names.size(); ++lm) {
            for (std::size_t wm = 0; wm < names.size(); ++wm) {
                for (auto s : config.seeds) pairs.push_back({p, lm, wm, s});
            }
        }
    }
    std::vector<std::vector<DayRow>> int_rows(pairs.size());
    run_jobs(pairs.size(), [&](std::size_t pi) {
        const auto& pr = pairs[pi];
        const double k = sc.penetration[pr.p] * peak_load / peak_wind;
        const auto lf = read_bundles(out, forecast_file(load_ds, names[pr.lm], coord, pr.seed));
        const auto wf = read_bundles(out, forecast_file(wind_ds, names[pr.wm], coord, pr.seed));
        check_alignment(lf, load_actual, days, names[pr.lm] + " load forecasts");
        check_alignment(wf, load_actual, days, names[pr.wm] + " wind forecasts");
        for (std::size_t d = 0; d < days; ++d) {
            int_rows[pi].push_back(guarded([&](DayRow& row) {
                const auto da = dispatch::integrated_day_ahead(level(lf[d], coarse), scaled(level(wf[d], coarse), k), sys);
                if (!da.ok()) {
                    row.status = dispatch::status_name(da.status);
                    row.message = da.message;
                    return;
                }
                const auto id = dispatch::intraday_battery(da, level(lf[d], fine), scaled(level(wf[d], fine), k), sys,
                                                           sc.window_hours);
                if (!id.ok()) {
                    row.status = dispatch::status_name(id.status);
                    row.message = id.message;
                    return;
                }
                const auto rt = dispatch::realtime_imbalance(da, id, level(load_actual[d], fine),
                                                             scaled(level(wind_actual[d], fine), k), sys);
                row.c_da = da.cost.total;
                row.c_id = id.cost.total;
                row.c_rt = rt.cost.total;
                row.imbalance = rt.cost.imbalance;
                row.curtailment = rt.cost.curtailment;
                row.fallback = id.imbalance_fallback;
                row.message = id.message;
            }));
        }
    });

    std::ostringstream int_csv;
    int_csv << "penetration,load_model,wind_model,seed,origin,status,c_da,c_id,c_rt,rt_minus_da,imbalance_cost,"
               "intraday_fallback,message\n";
    // mean settled cost per (penetration, load model, wind model)
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<double>> cell;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto& pr = pairs[pi];
        for (std::size_t d = 0; d < days; ++d) {
            const auto& row = int_rows[pi][d];
            int_csv << format_double(sc.penetration[pr.p]) << "," << names[pr.lm] << "," << names[pr.wm] << ","
                    << pr.seed << "," << data::format_iso8601(load_actual[d].origin_time) << "," << row.status
                    << cost_cells(row, true) << "," << (row.fallback ? 1 : 0) << "," << clean(row.message) << "\n";
            if (row.ok()) cell[{pr.p, pr.lm, pr.wm}].push_back(row.c_rt);
        }
    }
    std::ostringstream matrix, spread;
    matrix << "penetration,load_model";
    for (const auto& n : names) matrix << "," << n;
    matrix << "\n";
    spread << "penetration,mean_column_spread\n";
    for (std::size_t p = 0; p < sc.penetration.size(); ++p) {
        std::vector<double> spreads;
        for (std::size_t lm = 0; lm < names.size(); ++lm) {
            matrix << format_double(sc.penetration[p]) << "," << names[lm];
            double lo = INFINITY, hi = -INFINITY;
            bool complete = true;
            for (std::size_t wm = 0; wm < names.size(); ++wm) {
                const auto& v = cell[{p, lm, wm}];
                if (v.empty()) {
                    matrix << ",";
                    complete = false;
                    continue;
                }
                const double m = metrics::mean(v);
                lo = std::min(lo, m);
                hi = std::max(hi, m);
                matrix << "," << format_double(m);
            }
            matrix << "\n";
            if (complete) spreads.push_back(hi - lo);
        }
        spread << format_double(sc.penetration[p]) << ","
               << (spreads.empty() ? std::string() : format_double(metrics::mean(spreads))) << "\n";
    }
    out.write("schedule/integrated_costs.csv", int_csv.str());
    out.write("schedule/integrated_matrix.csv", matrix.str());
    out.write("schedule/integrated_spread.csv", spread.str());
    write_manifest(out, "schedule", config_bytes, extra);
}

}  // namespace hnl::cli
