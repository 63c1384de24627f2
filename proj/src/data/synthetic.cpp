#include "hnl/data/synthetic.hpp"

#include "hnl/core/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hnl::data {

double toy_signal(double t) { return std::sin(t) + std::sin(2.0 * t) + 0.5 * std::sin(12.0 * t); }

RawSeries synthesize_toy(const ToySpec& spec) {
    if (!(spec.duration > 0.0) || !(spec.resolution > 0.0)) {
        throw ValidationError("toy duration and resolution must be positive");
    }
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.resolution));
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    RawSeries s;
    s.resolution = spec.resolution;
    s.values.resize(n);
    s.timestamps.resize(n);
    const double step_seconds = 3600.0 / spec.resolution;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = spec.start_time + static_cast<double>(i) / spec.resolution;
        s.values[i] = toy_signal(t) + (spec.noise_std > 0.0 ? spec.noise_std * noise(rng) : 0.0);
        s.timestamps[i] = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * step_seconds));
    }
    s.exog = Matrix(n, 0);
    return s;
}

EnergyKind parse_energy_kind(const std::string& name) {
    if (name == "load") return EnergyKind::load;
    if (name == "wind") return EnergyKind::wind;
    throw ValidationError("unknown synthetic series kind '" + name + "' (expected load or wind)");
}

RawSeries synthesize_energy(const EnergySpec& spec) {
    if (spec.days < 1 || !(spec.resolution > 0.0)) throw ValidationError("synthetic days and resolution must be positive");
    const double per_hour = spec.resolution;
    const auto n = static_cast<std::size_t>(std::llround(spec.days * 24.0 * per_hour));
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RawSeries s;
    s.resolution = per_hour;
    s.values.resize(n);
    s.timestamps.resize(n);
    s.exog_names = {"nwp"};
    s.exog = Matrix(n, 1);
    const double step_seconds = 3600.0 / per_hour;
    for (std::size_t i = 0; i < n; ++i) {
        s.timestamps[i] = kSyntheticEpoch + static_cast<std::int64_t>(std::llround(static_cast<double>(i + 1) * step_seconds));
    }
    const double two_pi = 2.0 * std::numbers::pi;
    if (spec.kind == EnergyKind::load) {
        double drift = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / per_hour;
            drift = 0.995 * drift + 0.3 * gauss(rng);
            const double y = spec.base + spec.daily_amplitude * std::sin(two_pi * (t - 8.0) / 24.0) +
                             spec.weekly_amplitude * std::sin(two_pi * t / 168.0) + 2.0 * drift +
                             spec.noise_std * gauss(rng);
            s.values[i] = y;
            s.exog(i, 0) = drift + 0.5 * gauss(rng);
        }
    } else {
        const std::size_t hours = static_cast<std::size_t>(spec.days) * 24 + 2;
        std::vector<double> latent(hours, 0.0);
        for (std::size_t h = 1; h < hours; ++h) latent[h] = 0.97 * latent[h - 1] + 0.35 * gauss(rng);
        double fast = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / per_hour;
            const auto h = static_cast<std::size_t>(t);
            const double frac = t - static_cast<double>(h);
            const double lat = latent[h] + (latent[h + 1] - latent[h]) * frac;
            fast = 0.9 * fast + 0.08 * gauss(rng);
            s.values[i] = spec.capacity / (1.0 + std::exp(-(1.2 * lat + 3.0 * fast)));
            s.exog(i, 0) = lat + 0.3 * gauss(rng);
        }
    }
    return s;
}

}  // namespace hnl::data
