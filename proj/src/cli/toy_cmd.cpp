#include "hnl/cli/commands.hpp"

#include "hnl/core/error.hpp"
#include "hnl/data/synthetic.hpp"
#include "hnl/forecast/hnl_model.hpp"
#include "hnl/metrics/metrics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

namespace hnl::cli {
namespace {

using metrics::format_double;

/// Toy window whose origin sits at a multiple of 2 pi, so every window sees
/// the same phase of the periodic signal. Samples are stamped at interval
/// midpoints to line up with the forecast times.
data::WindowSample toy_window(const ToyConfig& c, const forecast::InputSpec& spec, std::size_t k, double noise,
                              std::uint64_t seed) {
    const double origin = 2.0 * std::numbers::pi * static_cast<double>(k + 1);
    data::ToySpec ts;
    ts.resolution = c.resolution;
    ts.duration = static_cast<double>(spec.history_steps + spec.horizon_steps) / c.resolution;
    ts.start_time = origin - static_cast<double>(spec.history_steps) / c.resolution + 0.5 / c.resolution;
    ts.noise_std = noise;
    ts.seed = seed;
    const auto s = data::synthesize_toy(ts);
    data::WindowSample w;
    w.origin = k;
    w.origin_time = static_cast<std::int64_t>(k);
    w.history.assign(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(spec.history_steps));
    w.target.assign(s.values.begin() + static_cast<std::ptrdiff_t>(spec.history_steps), s.values.end());
    w.exog = Matrix(spec.horizon_steps, 0);
    return w;
}

std::string spectrum_csv(const ToyResult& r) {
    std::ostringstream os;
    os << "frequency,angular_frequency,amplitude_forecast,amplitude_truth\n";
    for (std::size_t i = 0; i < r.spectrum.frequencies.size(); ++i) {
        const double f = r.spectrum.frequencies[i];
        os << format_double(f) << "," << format_double(2.0 * std::numbers::pi * f) << ","
           << format_double(r.spectrum.amplitudes[i]) << "," << format_double(r.truth_spectrum.amplitudes[i]) << "\n";
    }
    return os.str();
}

std::string reconstruction_csv(const ToyResult& r) {
    std::ostringstream os;
    os << "t,truth,forecast\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        os << format_double(r.times[i]) << "," << format_double(r.truth[i]) << "," << format_double(r.forecast[i])
           << "\n";
    }
    return os.str();
}

}  // namespace

std::vector<double> sinusoid_amplitudes(const std::vector<double>& t, const std::vector<double>& y,
                                        const std::vector<double>& omegas) {
    if (t.size() != y.size() || t.size() < 2 * omegas.size() + 1) {
        throw ValidationError("sinusoid fit needs matching samples, more than twice the frequency count");
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(2 * omegas.size() + 1));
    Eigen::VectorXd b(static_cast<Eigen::Index>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        A(r, 0) = 1.0;
        for (std::size_t k = 0; k < omegas.size(); ++k) {
            A(r, static_cast<Eigen::Index>(2 * k + 1)) = std::sin(omegas[k] * t[i]);
            A(r, static_cast<Eigen::Index>(2 * k + 2)) = std::cos(omegas[k] * t[i]);
        }
        b(r) = y[i];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    std::vector<double> amp;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        amp.push_back(std::hypot(c(static_cast<Eigen::Index>(2 * k + 1)), c(static_cast<Eigen::Index>(2 * k + 2))));
    }
    return amp;
}

ToyResult run_toy(const ToyConfig& c, int frequency) {
    forecast::InputSpec spec;
    spec.base_resolution = c.resolution;
    spec.history_steps = static_cast<std::size_t>(std::llround(c.history_units * c.resolution));
    spec.horizon_steps = static_cast<std::size_t>(std::llround(2.0 * c.T * c.resolution));
    spec.exog_count = 0;
    spec.exog_block = 1;
    data::NormStats stats;  // the toy signal is already O(1)

    forecast::HnlConfig hc;
    hc.resolutions = {c.resolution};
    hc.T = c.T;
    hc.gamma = 0.0;
    hc.anchors = {frequency};
    hc.d_h = c.d_h;
    hc.encoder_hidden = c.encoder_hidden;
    hc.decoder_hidden = c.decoder_hidden;

    std::vector<data::WindowSample> train, val;
    const std::uint64_t base = c.train.seed * 100003u;
    for (std::size_t k = 0; k < c.train_windows; ++k) train.push_back(toy_window(c, spec, k, c.noise_std, base + k));
    for (std::size_t k = 0; k < c.val_windows; ++k) {
        val.push_back(toy_window(c, spec, c.train_windows + k, c.noise_std, base + c.train_windows + k));
    }
    forecast::HnlModel model(hc, spec, stats, c.train.seed);
    const auto log = forecast::train_hnl(model, train, val, c.train);

    const auto test = toy_window(c, spec, c.train_windows + c.val_windows, 0.0, 0);
    ToyResult r;
    r.frequency = frequency;
    r.cutoff = frequency / (2.0 * c.T);
    r.best_val_mse = log.best_val_mse;
    r.times = model.forecast_times(c.resolution);
    r.forecast = model.assemble_forecast(test, c.resolution);
    for (double t : r.times) r.truth.push_back(data::toy_signal(t));
    const auto amp = sinusoid_amplitudes(r.times, r.forecast, {1.0, 2.0, 12.0});
    r.amplitude_1 = amp[0];
    r.amplitude_2 = amp[1];
    r.amplitude_12 = amp[2];
    r.spectrum = metrics::dft_amplitudes(r.forecast, c.resolution);
    r.truth_spectrum = metrics::dft_amplitudes(r.truth, c.resolution);
    return r;
}

void cmd_toy(const RunConfig& config, const std::string& config_bytes, OutputDir& out) {
    const auto& tc = config.toy;
    std::vector<ToyResult> results(tc.frequencies.size());
    run_jobs(results.size(), [&](std::size_t i) { results[i] = run_toy(tc, tc.frequencies[i]); });
    std::ostringstream summary;
    summary << "frequency,cutoff,cutoff_angular,amplitude_1,amplitude_2,amplitude_12,best_val_mse\n";
    for (const auto& r : results) {
        const std::string n = std::to_string(r.frequency);
        out.write("toy/spectrum_N" + n + ".csv", spectrum_csv(r));
        out.write("toy/reconstruction_N" + n + ".csv", reconstruction_csv(r));
        summary << r.frequency << "," << format_double(r.cutoff) << ","
                << format_double(2.0 * std::numbers::pi * r.cutoff) << "," << format_double(r.amplitude_1) << ","
                << format_double(r.amplitude_2) << "," << format_double(r.amplitude_12) << ","
                << format_double(r.best_val_mse) << "\n";
    }
    out.write("toy/summary.csv", summary.str());

    if (tc.large_decoder) {
        // one decoder over the whole spectrum against the banded model, same budget
        RunConfig rc = config;
        DatasetConfig d;
        d.name = "large_decoder_load";
        d.synthetic.kind = data::EnergyKind::load;
        d.synthetic.days = tc.large_days;
        d.synthetic.resolution = config.ladder.back();
        d.synthetic.seed = tc.train.seed;
        const auto prep = prepare_data(rc, d);
        forecast::HnlConfig hc;
        hc.T = config.horizon_hours;
        for (const auto& m : config.models) {
            if (m.kind == ModelKind::hnl) {
                hc = m.hnl;
                break;
            }
        }
        hc.resolutions = config.ladder;
        hc.anchors.clear();
        const int n_full = static_cast<int>(std::llround(hc.T * config.ladder.back()));
        const auto nl_cfg = forecast::nl_config(hc, config.ladder.back(), n_full);
        std::vector<forecast::HnlModel> models{forecast::HnlModel(hc, prep.spec, prep.dataset.stats, tc.train.seed),
                                               forecast::HnlModel(nl_cfg, prep.spec, prep.dataset.stats, tc.train.seed)};
        std::vector<forecast::TrainLog> logs(2);
        run_jobs(2, [&](std::size_t i) { logs[i] = forecast::train_hnl(models[i], prep.train, prep.val, tc.large_train); });
        std::ostringstream s, f;
        s << "model,frequency,best_epoch,best_val_mse,test_rmse_time,test_rmse_freq\n";
        const char* names[2] = {"hnl", "nl_single"};
        std::vector<std::vector<double>> first(2);
        for (std::size_t i = 0; i < 2; ++i) {
            std::vector<double> rt, rf;
            for (const auto& w : prep.test) {
                const auto fc = models[i].assemble_forecast(w, config.ladder.back());
                rt.push_back(metrics::rmse_time(fc, w.target));
                rf.push_back(metrics::rmse_freq(fc, w.target));
                if (first[i].empty()) first[i] = fc;
            }
            s << names[i] << "," << n_full << "," << logs[i].best_epoch << "," << format_double(logs[i].best_val_mse)
              << "," << format_double(metrics::mean(rt)) << "," << format_double(metrics::mean(rf)) << "\n";
        }
        f << "step,actual,hnl,nl_single\n";
        const auto& target = prep.test.front().target;
        for (std::size_t k = 0; k < target.size(); ++k) {
            f << k << "," << format_double(target[k]) << "," << format_double(first[0][k]) << ","
              << format_double(first[1][k]) << "\n";
        }
        out.write("toy/large_decoder_summary.csv", s.str());
        out.write("toy/large_decoder_forecast.csv", f.str());
    }
    write_manifest(out, "toy", config_bytes, {{"experiment", config.experiment}});
}

}  // namespace hnl::cli
