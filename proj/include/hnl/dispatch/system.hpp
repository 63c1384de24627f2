#pragma once

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace hnl::dispatch {

/// Quadratic cost a P^2 + b P + c per time step; power limits in kW, ramps in kW/h.
struct GeneratorSpec {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double capacity = 0.0;
    double ramp_up = 0.0;
    double ramp_down = 0.0;
};

struct BatterySpec {
    double capacity_kwh = 100.0;
    double soc_low = 0.1;
    double soc_high = 0.9;
    double soc_init = 0.5;
    double eta_c = 0.95;
    double eta_d = 0.95;
    double power = 50.0;              ///< charge and discharge limit, kW
    double degradation_price = 0.5;   ///< per kW of throughput per step
};

struct SystemSpec {
    std::vector<GeneratorSpec> generators;
    BatterySpec battery;
    double wind_penalty = 5.0;     ///< WC, per kW curtailed
    double price_positive = 10.0;  ///< pi_p, shortfall covered in real time
    double price_negative = 15.0;  ///< pi_n, surplus absorbed in real time
    double horizon_hours = 24.0;
    std::size_t pwl_segments = 8;

    /// Throws ValidationError when an invariant does not hold.
    void validate() const;
    double total_capacity() const;
};

/// Three generators, one battery; sized so the unconstrained optimum is interior.
SystemSpec default_system();

inline constexpr const char* kSystemSchema = "hnl.system/1";

nlohmann::json to_json(const SystemSpec& s);
/// Strict: unknown keys and a wrong schema tag are rejected.
SystemSpec system_from_json(const nlohmann::json& j);

/// Convex piecewise-linear cost on [0, capacity]: constant + sum of segment
/// slope * fill, segments filled in order.
struct PwlCost {
    double constant = 0.0;
    std::vector<double> widths;
    std::vector<double> slopes;

    double capacity() const;
    double evaluate(double p) const;
};

/// K equal-width chords of a P^2 + b P + c on [0, capacity]. The chord lies
/// above the parabola by at most a (capacity / K)^2 / 4. With a = 0 the cost
/// is already linear and a single segment is returned.
PwlCost pwl_linearize(double a, double b, double c, double capacity, std::size_t segments);
PwlCost pwl_linearize(const GeneratorSpec& g, std::size_t segments);

double quadratic_cost(const GeneratorSpec& g, double p);

}  // namespace hnl::dispatch
