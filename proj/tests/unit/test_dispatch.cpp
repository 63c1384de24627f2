#include <doctest.h>

#include "hnl/core/error.hpp"
#include "hnl/dispatch/schedule.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace hnl;
using namespace hnl::dispatch;

namespace {

std::vector<double> daily_load(std::size_t n, double base = 200.0, double amp = 40.0) {
    std::vector<double> l(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 24.0 * (i + 0.5) / static_cast<double>(n);
        l[i] = base + amp * std::sin(2.0 * std::numbers::pi * (t - 8.0) / 24.0);
    }
    return l;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-12, std::abs(b)); }

}  // namespace

TEST_CASE("pwl: linear cost is a single segment") {
    const auto f = pwl_linearize(0.0, 3.0, 1.0, 50.0, 8);
    REQUIRE(f.slopes.size() == 1);
    CHECK(f.slopes[0] == 3.0);
    CHECK(f.widths[0] == 50.0);
    CHECK(f.evaluate(10.0) == 31.0);
    CHECK_THROWS_AS(pwl_linearize(-0.1, 1.0, 0.0, 10.0, 4), ValidationError);
    CHECK_THROWS_AS(pwl_linearize(0.1, 1.0, 0.0, 10.0, 0), ValidationError);
}

TEST_CASE("pwl: chord error bound") {
    const GeneratorSpec g{0.04, 3.0, 2.0, 100.0, 10.0, 10.0};
    double prev = 0.0;
    for (std::size_t K : {1u, 2u, 4u, 8u, 16u}) {
        const auto f = pwl_linearize(g, K);
        for (std::size_t k = 1; k < f.slopes.size(); ++k) CHECK(f.slopes[k] > f.slopes[k - 1]);
        CHECK(f.capacity() == doctest::Approx(100.0));
        double worst = 0.0;
        for (int s = 0; s <= 20000; ++s) {
            const double p = 100.0 * s / 20000.0;
            const double d = f.evaluate(p) - quadratic_cost(g, p);
            CHECK(d >= -1e-9);
            worst = std::max(worst, d);
        }
        const double w = 100.0 / K;
        // chord-vs-parabola: maximum a w^2 / 4 at every segment midpoint
        CHECK(worst == doctest::Approx(g.a * w * w / 4.0).epsilon(1e-9));
        if (prev > 0.0) CHECK(prev / worst == doctest::Approx(4.0).epsilon(1e-9));
        prev = worst;
    }
}

TEST_CASE("system spec json is strict") {
    const auto s = default_system();
    const auto j = to_json(s);
    const auto back = system_from_json(j);
    CHECK(to_json(back) == j);
    auto extra = j;
    extra["surprise"] = 1;
    CHECK_THROWS_WITH_AS(system_from_json(extra), doctest::Contains("surprise"), ConfigError);
    auto wrong = j;
    wrong["generators"][0]["a"] = -1.0;
    CHECK_THROWS_AS(system_from_json(wrong), ConfigError);
    auto schema = j;
    schema["schema"] = "other/9";
    CHECK_THROWS_AS(system_from_json(schema), ConfigError);
}

TEST_CASE("day-ahead: degenerate instances") {
    SystemSpec sys = default_system();
    const auto zero = day_ahead_schedule(std::vector<double>(24, 0.0), sys);
    REQUIRE(zero.ok());
    CHECK(zero.cost.total == 0.0);
    for (const auto& g : zero.generation) {
        for (double p : g) CHECK(p == 0.0);
    }
    const auto over = day_ahead_schedule(std::vector<double>(24, 1000.0), sys);
    CHECK(over.status == LpStatus::infeasible);
    CHECK_FALSE(over.message.empty());
}

TEST_CASE("day-ahead: flat load goes to the cheapest unit (grid oracle)") {
    SystemSpec sys;
    sys.horizon_hours = 3.0;
    sys.generators = {{0.01, 2.0, 0.0, 100.0, 500.0, 500.0}, {0.02, 3.0, 0.0, 100.0, 500.0, 500.0}};
    // an empty battery: with stored energy the optimum would spend it first
    sys.battery.soc_init = sys.battery.soc_low;
    const std::vector<double> load(3, 30.0);
    const auto s = day_ahead_schedule(load, sys);
    REQUIRE(s.ok());
    // brute-force split of each step's load between the two units
    double grid_best = 0.0;
    const auto f1 = pwl_linearize(sys.generators[0], sys.pwl_segments);
    const auto f2 = pwl_linearize(sys.generators[1], sys.pwl_segments);
    for (double l : load) {
        double best = 1e300;
        for (int k = 0; k <= 3000; ++k) {
            const double p1 = l * k / 3000.0;
            best = std::min(best, f1.evaluate(p1) + f2.evaluate(l - p1));
        }
        grid_best += best;
    }
    CHECK(s.cost.total == doctest::Approx(grid_best).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s.generation[0][i] == doctest::Approx(30.0));
        CHECK(s.generation[1][i] == doctest::Approx(0.0));
        CHECK(s.charge[i] <= 1e-9);
        CHECK(s.discharge[i] <= 1e-9);
    }
}

TEST_CASE("day-ahead: constraints hold at 5-minute resolution") {
    const SystemSpec sys = default_system();
    const auto load = daily_load(288);
    const auto s = day_ahead_schedule(load, sys);
    REQUIRE(s.ok());
    CHECK(complementarity_gap(s) <= 1e-6);
    const auto gen = s.total_generation();
    const auto& b = sys.battery;
    for (std::size_t i = 0; i < 288; ++i) {
        CHECK(std::abs(gen[i] + s.discharge[i] - s.charge[i] - load[i]) <= 1e-6);
        const double prev = i == 0 ? b.soc_init : s.soc[i - 1];
        CHECK(std::abs(b.capacity_kwh * (s.soc[i] - prev) - (s.charge[i] * b.eta_c - s.discharge[i] / b.eta_d) * s.dt) <=
              1e-8);
        CHECK(s.soc[i] >= b.soc_low - 1e-9);
        CHECK(s.soc[i] <= b.soc_high + 1e-9);
        for (std::size_t j = 0; j < sys.generators.size(); ++j) {
            const auto& g = sys.generators[j];
            CHECK(s.generation[j][i] >= -1e-9);
            CHECK(s.generation[j][i] <= g.capacity + 1e-9);
            if (i > 0) {
                CHECK(s.generation[j][i] - s.generation[j][i - 1] <= g.ramp_up * s.dt + 1e-9);
                CHECK(s.generation[j][i - 1] - s.generation[j][i] <= g.ramp_down * s.dt + 1e-9);
            }
        }
    }
    // the optimized cost upper-bounds the true quadratic cost by the chord bound
    double bound = 0.0;
    for (const auto& g : sys.generators) {
        const double w = g.capacity / static_cast<double>(sys.pwl_segments);
        bound += g.a * w * w / 4.0 * 288.0;
    }
    CHECK(s.cost.generation >= s.cost.generation_quadratic - 1e-9);
    CHECK(s.cost.generation - s.cost.generation_quadratic <= bound + 1e-9);
}

TEST_CASE("real-time: perfect forecasts reproduce the day-ahead cost") {
    const SystemSpec sys = default_system();
    for (std::size_t n : {24u, 96u}) {
        const auto load = daily_load(n, 180.0, 50.0);
        const auto da = day_ahead_schedule(load, sys);
        REQUIRE(da.ok());
        const auto rt = realtime_settle(da, load, sys);
        REQUIRE(rt.ok());
        CHECK_FALSE(rt.imbalance_fallback);
        CHECK(rel(rt.cost.total, da.cost.total) <= 1e-6);
    }
}

TEST_CASE("real-time: a small surprise costs battery throughput") {
    SystemSpec sys = default_system();
    sys.horizon_hours = 2.0;
    // throughput dearer than any marginal generator cost keeps the battery idle day-ahead
    sys.battery.degradation_price = 10.0;
    const std::vector<double> forecast{100.0, 100.0}, actual{100.0, 101.0};
    const auto da = day_ahead_schedule(forecast, sys);
    REQUIRE(da.ok());
    CHECK(da.charge == std::vector<double>{0.0, 0.0});
    CHECK(da.discharge == std::vector<double>{0.0, 0.0});
    const auto rt = realtime_settle(da, actual, sys);
    REQUIRE(rt.ok());
    // the extra kW at step 2 can only come from discharging: pi / eta_d
    CHECK(rt.cost.battery == doctest::Approx(sys.battery.degradation_price / sys.battery.eta_d).epsilon(1e-9));
    CHECK(rt.cost.total > da.cost.total);
}

TEST_CASE("real-time: gap beyond the battery is priced as imbalance") {
    SystemSpec sys = default_system();
    sys.horizon_hours = 2.0;
    sys.battery.degradation_price = 10.0;
    sys.battery.soc_init = sys.battery.soc_high;
    sys.price_positive = 20.0;
    const std::vector<double> forecast{100.0, 100.0}, actual{100.0, 180.0};
    const auto da = day_ahead_schedule(forecast, sys);
    const auto rt = realtime_settle(da, actual, sys);
    REQUIRE(rt.ok());
    CHECK(rt.imbalance_fallback);
    CHECK(rt.discharge[1] == doctest::Approx(sys.battery.power));
    CHECK(rt.imbalance_pos[1] == doctest::Approx(30.0));
    CHECK(rt.cost.imbalance == doctest::Approx(30.0 * sys.price_positive));
    CHECK(complementarity_gap(rt) <= 1e-6);

    // surplus with a full battery: charging alone cannot absorb it
    const auto da2 = day_ahead_schedule(forecast, sys);
    const auto rt2 = realtime_settle(da2, std::vector<double>{100.0, 40.0}, sys);
    REQUIRE(rt2.ok());
    CHECK(rt2.imbalance_fallback);
    CHECK(complementarity_gap(rt2) <= 1e-6);
    CHECK(rt2.imbalance_neg[1] > 0.0);
}

TEST_CASE("integrated day-ahead: degenerate wind") {
    SystemSpec sys = default_system();
    const auto load = daily_load(24);
    const auto a = integrated_day_ahead(load, std::vector<double>(24, 0.0), sys);
    REQUIRE(a.ok());
    for (double v : a.wind_curtailed) CHECK(v == 0.0);
    SystemSpec no_battery = sys;
    no_battery.battery.power = 0.0;
    const auto b = day_ahead_schedule(load, no_battery);
    REQUIRE(b.ok());
    CHECK(a.cost.total == doctest::Approx(b.cost.total).epsilon(1e-12));
}

TEST_CASE("integrated day-ahead: curtailment (enumeration oracle)") {
    SystemSpec sys;
    sys.horizon_hours = 2.0;
    sys.generators = {{0.0, 2.0, 0.0, 100.0, 25.0, 25.0}};
    const std::vector<double> load{50.0, 20.0}, wind{10.0, 40.0};
    const auto s = integrated_day_ahead(load, wind, sys);
    REQUIRE(s.ok());
    double best = 1e300;
    for (int a = 0; a <= 400; ++a) {
        for (int b = 0; b <= 400; ++b) {
            const double p1 = 0.25 * a, p2 = 0.25 * b;
            const double w1 = load[0] - p1, w2 = load[1] - p2;
            if (w1 < 0 || w1 > wind[0] || w2 < 0 || w2 > wind[1] || std::abs(p2 - p1) > 25.0) continue;
            best = std::min(best, 2.0 * (p1 + p2) + sys.wind_penalty * ((wind[0] - w1) + (wind[1] - w2)));
        }
    }
    CHECK(s.cost.total == doctest::Approx(best).epsilon(1e-12));
    CHECK(s.wind_curtailed[1] > 0.0);
    CHECK(s.cost.curtailment == doctest::Approx(sys.wind_penalty * s.wind_curtailed[1]));

    // free curtailment: generator cost of the residual load clipped at zero
    sys.wind_penalty = 0.0;
    sys.generators[0].ramp_up = sys.generators[0].ramp_down = 1000.0;
    const auto f = integrated_day_ahead(load, wind, sys);
    REQUIRE(f.ok());
    CHECK(f.cost.total == doctest::Approx(2.0 * (std::max(0.0, 50.0 - 10.0) + std::max(0.0, 20.0 - 40.0))));
}

TEST_CASE("intra-day: chained windows") {
    const SystemSpec sys = default_system();
    const auto load_low = daily_load(24);
    std::vector<double> wind_low(24);
    for (std::size_t i = 0; i < 24; ++i) wind_low[i] = 40.0 + 20.0 * std::cos(0.3 * i);
    const auto da = integrated_day_ahead(load_low, wind_low, sys);
    REQUIRE(da.ok());

    // unchanged forecasts: nothing to re-balance
    const auto same = intraday_battery(da, hold(load_low, 12), hold(wind_low, 12), sys);
    REQUIRE(same.ok());
    CHECK(same.steps() == 288);
    for (std::size_t i = 0; i < 288; ++i) {
        CHECK(same.charge[i] <= 1e-9);
        CHECK(same.discharge[i] <= 1e-9);
    }

    // perturbed forecasts: windows are chained through the SOC
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 8.0);
    auto load_hi = hold(load_low, 12), wind_hi = hold(wind_low, 12);
    for (auto& v : load_hi) v += noise(rng);
    const auto id = intraday_battery(da, load_hi, wind_hi, sys);
    REQUIRE(id.ok());
    CHECK(complementarity_gap(id) <= 1e-6);
    const auto& b = sys.battery;
    int windows = 0;
    for (std::size_t i = 0; i < 288; ++i) {
        const double prev = i == 0 ? b.soc_init : id.soc[i - 1];
        // recursion holds across window seams too, so the chain is continuous
        CHECK(std::abs(b.capacity_kwh * (id.soc[i] - prev) - (id.charge[i] * b.eta_c - id.discharge[i] / b.eta_d) * id.dt) <=
              1e-9);
        if (i % 48 == 0) ++windows;
    }
    CHECK(windows == 6);
    CHECK_THROWS_AS(intraday_battery(da, load_hi, wind_hi, sys, 5.0), ValidationError);
}

TEST_CASE("real-time imbalance: closed form") {
    const SystemSpec sys = default_system();
    const auto load_low = daily_load(24);
    const std::vector<double> wind_low(24, 30.0);
    const auto da = integrated_day_ahead(load_low, wind_low, sys);
    const auto load_hi = hold(load_low, 12), wind_hi = hold(wind_low, 12);
    const auto id = intraday_battery(da, load_hi, wind_hi, sys);
    REQUIRE(id.ok());
    const auto rt = realtime_imbalance(da, id, load_hi, wind_hi, sys);
    for (std::size_t i = 0; i < 288; ++i) {
        CHECK(rt.imbalance_pos[i] == doctest::Approx(0.0));
        CHECK(rt.imbalance_neg[i] == doctest::Approx(0.0));
    }
    auto bumped = load_hi;
    bumped[100] += 7.0;
    const auto rt2 = realtime_imbalance(da, id, bumped, wind_hi, sys);
    CHECK(rt2.cost.total - rt.cost.total == doctest::Approx(7.0 * sys.price_positive * rt.dt).epsilon(1e-9));
    for (std::size_t i = 0; i < 288; ++i) CHECK(std::min(rt2.imbalance_pos[i], rt2.imbalance_neg[i]) == 0.0);
    // a dip below the scheduled supply becomes negative imbalance
    auto dipped = load_hi;
    dipped[10] -= 60.0;
    const auto rt3 = realtime_imbalance(da, id, dipped, wind_hi, sys);
    CHECK(rt3.imbalance_neg[10] > 0.0);
    CHECK(rt3.imbalance_pos[10] == 0.0);
    CHECK(rt3.wind_curtailed[10] == doctest::Approx(std::max(0.0, wind_hi[10])));

    std::ostringstream csv;
    write_schedule_csv(csv, rt2);
    CHECK(csv.str().rfind("step,P1,P2,P3,charge", 0) == 0);
}
