#pragma once

#include "hnl/data/series.hpp"

#include <cstdint>
#include <string>

namespace hnl::data {

/// sin t + sin 2t + 0.5 sin 12t with t in hours from start_time.
struct ToySpec {
    double duration = 200.0;    ///< time units
    double resolution = 20.0;   ///< samples per unit
    double start_time = 0.0;
    double noise_std = 0.0;
    std::uint64_t seed = 1;
};

double toy_signal(double t);
/// Samples are taken at start_time + n / resolution, n = 0, 1, ...
RawSeries synthesize_toy(const ToySpec& spec);

enum class EnergyKind { load, wind };

struct EnergySpec {
    EnergyKind kind = EnergyKind::load;
    int days = 120;
    double resolution = 12.0;  ///< samples per hour
    std::uint64_t seed = 1;
    // load
    double base = 200.0;
    double daily_amplitude = 40.0;
    double weekly_amplitude = 15.0;
    double noise_std = 3.0;
    // wind
    double capacity = 100.0;
};

/// Load: base + daily and weekly sinusoids + slowly varying AR(1) drift +
/// white noise; exogenous column "nwp" is a noisy copy of the drift.
/// Wind: capacity * logistic(hourly latent AR(1) + fast turbulence); the
/// exogenous column is a noisy copy of the hourly latent.
RawSeries synthesize_energy(const EnergySpec& spec);

EnergyKind parse_energy_kind(const std::string& name);

/// First timestamp of synthetic series: 2024-01-01T00:00:00Z + one step.
inline constexpr std::int64_t kSyntheticEpoch = 1704067200;

}  // namespace hnl::data
