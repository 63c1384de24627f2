#pragma once

#include "hnl/dispatch/lp.hpp"
#include "hnl/dispatch/system.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hnl::dispatch {

/// Cost contributions; each already carries whatever time scaling its
/// problem uses, so total is their sum.
struct CostBreakdown {
    double generation = 0.0;            ///< piecewise-linear generator cost, as optimized
    double generation_quadratic = 0.0;  ///< true quadratic cost of the same schedule (reported only)
    double battery = 0.0;
    double curtailment = 0.0;
    double imbalance = 0.0;
    double total = 0.0;
};

struct ScheduleSolution {
    LpStatus status = LpStatus::infeasible;
    std::string message;
    double dt = 1.0;  ///< hours per step
    std::vector<std::vector<double>> generation;  ///< [generator][step], kW
    std::vector<double> charge, discharge, soc;
    std::vector<double> wind_used, wind_curtailed;
    std::vector<double> imbalance_pos, imbalance_neg;
    CostBreakdown cost;
    bool imbalance_fallback = false;  ///< real-time gap priced as imbalance
    std::size_t lp_iterations = 0;

    bool ok() const noexcept { return status == LpStatus::optimal; }
    std::size_t steps() const;
    std::vector<double> total_generation() const;
};

/// Day-ahead generator + battery dispatch against a load forecast: minimizes
/// generator cost plus battery degradation. The charge/discharge exclusivity
/// binaries are relaxed; the optimum is then checked for complementarity and a
/// violation throws NumericError.
ScheduleSolution day_ahead_schedule(std::span<const double> load, const SystemSpec& system);

/// Generators frozen at the day-ahead schedule, battery re-solved against the
/// actual load. When the battery alone cannot close the gap the residual is
/// priced as imbalance and the solution is flagged.
ScheduleSolution realtime_settle(const ScheduleSolution& day_ahead, std::span<const double> actual,
                                 const SystemSpec& system);

/// Hourly generator schedule with wind and curtailment penalty; objective scaled by dt.
ScheduleSolution integrated_day_ahead(std::span<const double> load, std::span<const double> wind,
                                      const SystemSpec& system);

/// Battery schedule on consecutive windows at the fine resolution with the
/// day-ahead generators held per coarse step; SOC is chained across windows.
ScheduleSolution intraday_battery(const ScheduleSolution& day_ahead, std::span<const double> load,
                                  std::span<const double> wind, const SystemSpec& system,
                                  double window_hours = 4.0);

/// Closed-form settlement: every schedule fixed, wind use chosen per step and
/// the remaining residual split into positive and negative imbalance.
ScheduleSolution realtime_imbalance(const ScheduleSolution& day_ahead, const ScheduleSolution& intraday,
                                    std::span<const double> load, std::span<const double> wind,
                                    const SystemSpec& system);

/// Largest min(P^c, P^d) over steps.
double complementarity_gap(const ScheduleSolution& s);
/// Throws NumericError naming the first step whose charge and discharge are both active.
void check_complementarity(const ScheduleSolution& s, double tolerance = 1e-6);

/// Coarse per-step values repeated `factor` times.
std::vector<double> hold(std::span<const double> coarse, std::size_t factor);

/// step,P1..PJ,charge,discharge,soc,wind_used,wind_curtailed,imbalance_pos,imbalance_neg
void write_schedule_csv(std::ostream& os, const ScheduleSolution& s);
void write_cost_summary(std::ostream& os, const ScheduleSolution& s);

}  // namespace hnl::dispatch
