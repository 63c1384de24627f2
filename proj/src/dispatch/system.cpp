#include "hnl/dispatch/system.hpp"

#include "hnl/core/error.hpp"
#include "hnl/core/json_util.hpp"

#include <cmath>

namespace hnl::dispatch {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("system: " + what);
}

}  // namespace

void SystemSpec::validate() const {
    require(!generators.empty(), "at least one generator is required");
    for (std::size_t j = 0; j < generators.size(); ++j) {
        const auto& g = generators[j];
        const std::string tag = "generator " + std::to_string(j) + ": ";
        require(std::isfinite(g.a) && std::isfinite(g.b) && std::isfinite(g.c), tag + "non-finite cost coefficient");
        require(g.a >= 0.0, tag + "a < 0 makes the cost non-convex");
        require(g.capacity > 0.0 && std::isfinite(g.capacity), tag + "capacity must be positive");
        require(g.ramp_up > 0.0 && g.ramp_down > 0.0, tag + "ramp rates must be positive");
    }
    const auto& b = battery;
    require(b.capacity_kwh > 0.0, "battery capacity must be positive");
    require(0.0 <= b.soc_low && b.soc_low <= b.soc_init && b.soc_init <= b.soc_high && b.soc_high <= 1.0,
            "battery needs 0 <= soc_low <= soc_init <= soc_high <= 1");
    require(b.eta_c > 0.0 && b.eta_c < 1.0 && b.eta_d > 0.0 && b.eta_d < 1.0, "efficiencies must lie in (0, 1)");
    require(b.power >= 0.0, "battery power limit must be non-negative");
    require(b.degradation_price >= 0.0, "degradation price must be non-negative");
    require(wind_penalty >= 0.0 && price_positive >= 0.0 && price_negative >= 0.0, "prices must be non-negative");
    require(horizon_hours > 0.0, "horizon must be positive");
    require(pwl_segments >= 1, "at least one cost segment is required");
}

double SystemSpec::total_capacity() const {
    double s = 0.0;
    for (const auto& g : generators) s += g.capacity;
    return s;
}

SystemSpec default_system() {
    SystemSpec s;
    s.generators = {{0.02, 2.0, 0.0, 150.0, 60.0, 60.0},
                    {0.04, 3.0, 0.0, 100.0, 80.0, 80.0},
                    {0.06, 4.0, 0.0, 80.0, 120.0, 120.0}};
    return s;
}

nlohmann::json to_json(const SystemSpec& s) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : s.generators) {
        gens.push_back({{"a", g.a}, {"b", g.b}, {"c", g.c}, {"capacity", g.capacity}, {"ramp_up", g.ramp_up},
                        {"ramp_down", g.ramp_down}});
    }
    const auto& b = s.battery;
    return {{"schema", kSystemSchema},
            {"generators", gens},
            {"battery",
             {{"capacity_kwh", b.capacity_kwh}, {"soc_low", b.soc_low}, {"soc_high", b.soc_high},
              {"soc_init", b.soc_init}, {"eta_c", b.eta_c}, {"eta_d", b.eta_d}, {"power", b.power},
              {"degradation_price", b.degradation_price}}},
            {"wind_penalty", s.wind_penalty},
            {"price_positive", s.price_positive},
            {"price_negative", s.price_negative},
            {"horizon_hours", s.horizon_hours},
            {"pwl_segments", s.pwl_segments}};
}

SystemSpec system_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"schema", "generators", "battery", "wind_penalty", "price_positive", "price_negative",
                         "horizon_hours", "pwl_segments"},
                        "system");
    const auto schema = json_get<std::string>(j, "schema", "system");
    if (schema != kSystemSchema) throw ConfigError("system.schema: expected '" + std::string(kSystemSchema) + "'");
    SystemSpec s;
    const auto& gens = j.at("generators");
    if (!gens.is_array()) throw ConfigError("system.generators: expected an array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string path = "system.generators[" + std::to_string(i) + "]";
        reject_unknown_keys(gens[i], {"a", "b", "c", "capacity", "ramp_up", "ramp_down"}, path);
        GeneratorSpec g;
        g.a = json_get<double>(gens[i], "a", path);
        g.b = json_get<double>(gens[i], "b", path);
        g.c = json_get_or<double>(gens[i], "c", 0.0, path);
        g.capacity = json_get<double>(gens[i], "capacity", path);
        g.ramp_up = json_get<double>(gens[i], "ramp_up", path);
        g.ramp_down = json_get<double>(gens[i], "ramp_down", path);
        s.generators.push_back(g);
    }
    if (j.contains("battery")) {
        const auto& b = j.at("battery");
        const std::string path = "system.battery";
        reject_unknown_keys(b,
                            {"capacity_kwh", "soc_low", "soc_high", "soc_init", "eta_c", "eta_d", "power",
                             "degradation_price"},
                            path);
        BatterySpec d;
        s.battery.capacity_kwh = json_get_or(b, "capacity_kwh", d.capacity_kwh, path);
        s.battery.soc_low = json_get_or(b, "soc_low", d.soc_low, path);
        s.battery.soc_high = json_get_or(b, "soc_high", d.soc_high, path);
        s.battery.soc_init = json_get_or(b, "soc_init", d.soc_init, path);
        s.battery.eta_c = json_get_or(b, "eta_c", d.eta_c, path);
        s.battery.eta_d = json_get_or(b, "eta_d", d.eta_d, path);
        s.battery.power = json_get_or(b, "power", d.power, path);
        s.battery.degradation_price = json_get_or(b, "degradation_price", d.degradation_price, path);
    }
    s.wind_penalty = json_get_or(j, "wind_penalty", s.wind_penalty, "system");
    s.price_positive = json_get_or(j, "price_positive", s.price_positive, "system");
    s.price_negative = json_get_or(j, "price_negative", s.price_negative, "system");
    s.horizon_hours = json_get_or(j, "horizon_hours", s.horizon_hours, "system");
    s.pwl_segments = json_get_or<std::size_t>(j, "pwl_segments", s.pwl_segments, "system");
    try {
        s.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    return s;
}

double PwlCost::capacity() const {
    double s = 0.0;
    for (double w : widths) s += w;
    return s;
}

double PwlCost::evaluate(double p) const {
    double cost = constant, left = p;
    for (std::size_t k = 0; k < widths.size() && left > 0.0; ++k) {
        const double fill = std::min(left, widths[k]);
        cost += slopes[k] * fill;
        left -= fill;
    }
    return cost;
}

PwlCost pwl_linearize(double a, double b, double c, double capacity, std::size_t segments) {
    if (a < 0.0) throw ValidationError("pwl: a < 0 is non-convex");
    if (segments == 0) throw ValidationError("pwl: at least one segment is required");
    if (!(capacity > 0.0)) throw ValidationError("pwl: capacity must be positive");
    PwlCost f;
    f.constant = c;
    if (a == 0.0) {
        f.widths = {capacity};
        f.slopes = {b};
        return f;
    }
    const double w = capacity / static_cast<double>(segments);
    for (std::size_t k = 0; k < segments; ++k) {
        const double lo = w * static_cast<double>(k);
        const double hi = k + 1 == segments ? capacity : w * static_cast<double>(k + 1);
        f.widths.push_back(hi - lo);
        // chord slope of a P^2 + b P
        f.slopes.push_back(a * (lo + hi) + b);
    }
    return f;
}

PwlCost pwl_linearize(const GeneratorSpec& g, std::size_t segments) {
    return pwl_linearize(g.a, g.b, g.c, g.capacity, segments);
}

double quadratic_cost(const GeneratorSpec& g, double p) { return g.a * p * p + g.b * p + g.c; }

}  // namespace hnl::dispatch
