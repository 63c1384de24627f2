#include "hnl/metrics/metrics.hpp"

#include "hnl/core/error.hpp"
#include "hnl/metrics/downsample.hpp"
#include "hnl/metrics/spectrum.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace hnl::metrics {
namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("length mismatch: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    if (a.empty()) throw ValidationError("empty series");
}

}  // namespace

double rmse_time(std::span<const double> forecast, std::span<const double> actual) {
    check_pair(forecast, actual);
    double s = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const double d = forecast[i] - actual[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(forecast.size()));
}

double rmse_freq(std::span<const double> forecast, std::span<const double> actual) {
    check_pair(forecast, actual);
    const Spectrum a = dft_amplitudes(forecast);
    const Spectrum b = dft_amplitudes(actual);
    double s = 0.0;
    for (std::size_t k = 0; k < a.amplitudes.size(); ++k) {
        const double d = a.amplitudes[k] - b.amplitudes[k];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.amplitudes.size()));
}

double mce(std::span<const double> low, double low_resolution, std::span<const double> high,
           double high_resolution) {
    const std::vector<double> ds = block_downsample(high, high_resolution, low_resolution);
    if (ds.size() != low.size()) {
        throw ValidationError("downsampled length " + std::to_string(ds.size()) +
                              " does not match coarse length " + std::to_string(low.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < low.size(); ++i) {
        const double d = ds[i] - low[i];
        s += d * d;
    }
    return s / static_cast<double>(low.size());
}

std::vector<double> ladder_downsample(const Bundle& b, std::size_t from_level, std::size_t to_level) {
    if (b.levels.size() != b.resolutions.size()) {
        throw ValidationError("bundle resolutions and levels differ in count");
    }
    if (to_level > from_level || from_level >= b.levels.size()) {
        throw ValidationError("ladder downsampling needs to_level <= from_level < level count");
    }
    std::vector<double> cur = b.levels[from_level];
    for (std::size_t k = from_level; k > to_level; --k) {
        cur = block_downsample(cur, b.resolutions[k], b.resolutions[k - 1]);
    }
    return cur;
}

double bundle_mce(const Bundle& b, std::size_t i, std::size_t j) {
    const std::vector<double> ds = ladder_downsample(b, j, i);
    const auto& low = b.levels[i];
    if (ds.size() != low.size()) {
        throw ValidationError("downsampled length " + std::to_string(ds.size()) +
                              " does not match coarse length " + std::to_string(low.size()));
    }
    double s = 0.0;
    for (std::size_t k = 0; k < low.size(); ++k) {
        const double d = ds[k] - low[k];
        s += d * d;
    }
    return s / static_cast<double>(low.size());
}

double tce(const Bundle& bundle) {
    if (bundle.levels.size() != bundle.resolutions.size()) {
        throw ValidationError("bundle resolutions and levels differ in count");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < bundle.levels.size(); ++i) {
        for (std::size_t j = i + 1; j < bundle.levels.size(); ++j) total += bundle_mce(bundle, i, j);
    }
    return total;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

MetricsReport evaluate_bundles(const std::string& model, const std::string& coordination,
                               const std::vector<Bundle>& forecasts,
                               const std::vector<Bundle>& actuals) {
    if (forecasts.size() != actuals.size() || forecasts.empty()) {
        throw ValidationError("forecast and actual sets must be non-empty and equal in size");
    }
    MetricsReport r;
    r.model = model;
    r.coordination = coordination;
    r.resolutions = forecasts.front().resolutions;
    const std::size_t m = r.resolutions.size();
    r.rmse_time.assign(m, 0.0);
    r.mce.assign(m * (m - 1) / 2, 0.0);
    for (std::size_t s = 0; s < forecasts.size(); ++s) {
        const Bundle& f = forecasts[s];
        const Bundle& a = actuals[s];
        if (f.levels.size() != m || a.levels.size() != m) {
            throw ValidationError("bundle level count differs across samples");
        }
        for (std::size_t i = 0; i < m; ++i) r.rmse_time[i] += rmse_time(f.levels[i], a.levels[i]);
        r.rmse_freq += rmse_freq(f.levels.back(), a.levels.back());
        std::size_t p = 0;
        double t = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j, ++p) {
                const double e = bundle_mce(f, i, j);
                r.mce[p] += e;
                t += e;
            }
        }
        r.tce += t;
    }
    const double n = static_cast<double>(forecasts.size());
    for (double& v : r.rmse_time) v /= n;
    for (double& v : r.mce) v /= n;
    r.rmse_freq /= n;
    r.tce /= n;
    r.samples = forecasts.size();
    return r;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_report_kv(std::ostream& os, const MetricsReport& r) {
    os << "model = " << r.model << "\n";
    os << "coordination = " << r.coordination << "\n";
    os << "samples = " << r.samples << "\n";
    for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
        os << "rmse_time[" << format_double(r.resolutions[i]) << "] = " << format_double(r.rmse_time[i])
           << "\n";
    }
    os << "rmse_freq = " << format_double(r.rmse_freq) << "\n";
    std::size_t p = 0;
    for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
        for (std::size_t j = i + 1; j < r.resolutions.size(); ++j, ++p) {
            os << "mce[" << format_double(r.resolutions[i]) << "," << format_double(r.resolutions[j])
               << "] = " << format_double(r.mce[p]) << "\n";
        }
    }
    os << "tce = " << format_double(r.tce) << "\n";
}

void write_report_csv_header(std::ostream& os) {
    os << "model,coordination,resolution,rmse_time,rmse_freq,tce,samples\n";
}

void write_report_csv_rows(std::ostream& os, const MetricsReport& r) {
    for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
        os << r.model << "," << r.coordination << "," << format_double(r.resolutions[i]) << ","
           << format_double(r.rmse_time[i]) << "," << format_double(r.rmse_freq) << ","
           << format_double(r.tce) << "," << r.samples << "\n";
    }
}

}  // namespace hnl::metrics
