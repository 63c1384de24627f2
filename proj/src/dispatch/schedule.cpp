#include "hnl/dispatch/schedule.hpp"

#include "hnl/core/error.hpp"
#include "hnl/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace hnl::dispatch {

std::size_t ScheduleSolution::steps() const {
    if (!generation.empty()) return generation.front().size();
    return charge.size();
}

std::vector<double> ScheduleSolution::total_generation() const {
    std::vector<double> t(steps(), 0.0);
    for (const auto& g : generation) {
        for (std::size_t i = 0; i < g.size(); ++i) t[i] += g[i];
    }
    return t;
}

std::vector<double> hold(std::span<const double> coarse, std::size_t factor) {
    std::vector<double> out;
    out.reserve(coarse.size() * factor);
    for (double v : coarse) out.insert(out.end(), factor, v);
    return out;
}

double complementarity_gap(const ScheduleSolution& s) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.charge.size(); ++i) worst = std::max(worst, std::min(s.charge[i], s.discharge[i]));
    return worst;
}

namespace {

bool complementary(const std::vector<double>& pc, const std::vector<double>& pd, double tol, std::size_t* bad) {
    for (std::size_t i = 0; i < pc.size(); ++i) {
        if (std::min(pc[i], pd[i]) > tol || pc[i] * pd[i] > tol) {
            if (bad) *bad = i;
            return false;
        }
    }
    return true;
}

}  // namespace

void check_complementarity(const ScheduleSolution& s, double tolerance) {
    std::size_t bad = 0;
    if (!complementary(s.charge, s.discharge, tolerance, &bad)) {
        std::ostringstream os;
        os << "simultaneous charge and discharge at step " << bad << ": charge " << s.charge[bad] << " kW, discharge "
           << s.discharge[bad] << " kW (relaxation of the exclusivity binaries is invalid here)";
        throw NumericError(os.str());
    }
}

namespace {

void check_series(std::span<const double> v, const char* what) {
    if (v.empty()) throw ValidationError(std::string(what) + " series is empty");
    for (double x : v) {
        if (!std::isfinite(x)) throw ValidationError(std::string(what) + " series has a non-finite value");
    }
}

double step_hours(const SystemSpec& s, std::size_t n) { return s.horizon_hours / static_cast<double>(n); }

/// Generator segment variables and ramp rows; returns [j][i] -> segment variable ids.
std::vector<std::vector<std::vector<std::size_t>>> add_generators(LpProblem& lp, const SystemSpec& sys,
                                                                  std::size_t n, double dt, double scale) {
    std::vector<std::vector<std::vector<std::size_t>>> seg(sys.generators.size());
    for (std::size_t j = 0; j < sys.generators.size(); ++j) {
        const auto& g = sys.generators[j];
        const PwlCost f = pwl_linearize(g, sys.pwl_segments);
        seg[j].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < f.widths.size(); ++k) {
                seg[j][i].push_back(lp.add_variable(f.slopes[k] * scale, 0.0, f.widths[k]));
            }
            lp.objective_offset += f.constant * scale;
        }
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<std::pair<std::size_t, double>> t;
            for (auto v : seg[j][i]) t.emplace_back(v, 1.0);
            for (auto v : seg[j][i - 1]) t.emplace_back(v, -1.0);
            lp.add_row(t, RowSense::le, g.ramp_up * dt);
            lp.add_row(std::move(t), RowSense::ge, -g.ramp_down * dt);
        }
    }
    return seg;
}

/// Starting point: each step's target filled from the cheapest segments up,
/// ramps ignored. Only shortens phase 1.
void merit_order_start(LpProblem& lp, const std::vector<std::vector<std::vector<std::size_t>>>& seg,
                       std::span<const double> target) {
    lp.start.assign(lp.variable_count(), 0.0);
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < target.size(); ++i) {
        vars.clear();
        for (const auto& g : seg) vars.insert(vars.end(), g[i].begin(), g[i].end());
        std::stable_sort(vars.begin(), vars.end(), [&](std::size_t a, std::size_t b) { return lp.cost[a] < lp.cost[b]; });
        double left = target[i];
        for (auto v : vars) {
            if (left <= 0.0) break;
            lp.start[v] = std::min(left, lp.upper[v]);
            left -= lp.start[v];
        }
    }
}

std::vector<std::vector<double>> read_generation(const LpSolution& s,
                                                 const std::vector<std::vector<std::vector<std::size_t>>>& seg) {
    std::vector<std::vector<double>> out(seg.size());
    for (std::size_t j = 0; j < seg.size(); ++j) {
        for (const auto& vars : seg[j]) {
            double p = 0.0;
            for (auto v : vars) p += s.x[v];
            out[j].push_back(p);
        }
    }
    return out;
}

void generation_costs(ScheduleSolution& s, const SystemSpec& sys, double scale) {
    s.cost.generation = 0.0;
    s.cost.generation_quadratic = 0.0;
    for (std::size_t j = 0; j < s.generation.size(); ++j) {
        const PwlCost f = pwl_linearize(sys.generators[j], sys.pwl_segments);
        for (double p : s.generation[j]) {
            s.cost.generation += f.evaluate(p) * scale;
            s.cost.generation_quadratic += quadratic_cost(sys.generators[j], p) * scale;
        }
    }
}

double battery_cost(const BatterySpec& b, std::span<const double> pc, std::span<const double> pd, double scale) {
    double c = 0.0;
    for (std::size_t i = 0; i < pc.size(); ++i) c += b.degradation_price * (b.eta_c * pc[i] + pd[i] / b.eta_d);
    return c * scale;
}

struct BatteryVars {
    std::vector<std::size_t> pc, pd, soc;
};

/// Charge, discharge and SOC variables with the SOC recursion rows.
/// fix: +1 forbids discharge, -1 forbids charge, 0 leaves both free.
BatteryVars add_battery(LpProblem& lp, const SystemSpec& sys, std::size_t n, double dt, double scale,
                        double soc_init, const std::vector<int>* fix) {
    const auto& b = sys.battery;
    BatteryVars v;
    for (std::size_t i = 0; i < n; ++i) {
        const int f = fix ? (*fix)[i] : 0;
        v.pc.push_back(lp.add_variable(b.degradation_price * b.eta_c * scale, 0.0, f < 0 ? 0.0 : b.power));
        v.pd.push_back(lp.add_variable(b.degradation_price / b.eta_d * scale, 0.0, f > 0 ? 0.0 : b.power));
        v.soc.push_back(lp.add_variable(0.0, b.soc_low, b.soc_high));
    }
    // SOC_i - SOC_{i-1} - eta_c dt / Cap P^c_i + dt / (eta_d Cap) P^d_i = 0
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::size_t, double>> t{{v.soc[i], 1.0},
                                                      {v.pc[i], -b.eta_c * dt / b.capacity_kwh},
                                                      {v.pd[i], dt / (b.eta_d * b.capacity_kwh)}};
        if (i > 0) t.emplace_back(v.soc[i - 1], -1.0);
        lp.add_row(std::move(t), RowSense::eq, i == 0 ? soc_init : 0.0);
    }
    return v;
}

std::vector<double> values(const LpSolution& s, const std::vector<std::size_t>& ids) {
    std::vector<double> out;
    out.reserve(ids.size());
    for (auto v : ids) out.push_back(s.x[v]);
    return out;
}

/// Battery (and optionally wind) re-dispatch against a fixed supply:
/// W + P^d - P^c (+ P^p - P^n) = net_i, with W + W^c = wind_i when wind is present.
struct StageResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> pc, pd, soc, w, wc, pp, pn;
    bool elastic = false;
    bool fixed_modes = false;
    std::size_t iterations = 0;
};

StageResult solve_stage(const SystemSpec& sys, std::span<const double> net, std::span<const double> wind,
                        double dt, double scale, double soc_init) {
    const std::size_t n = net.size();
    const bool has_wind = !wind.empty();
    StageResult out;
    for (int mode = 0; mode < 3; ++mode) {
        const bool elastic = mode >= 1;
        std::vector<int> fix;
        if (mode == 2) {
            // pick each step's charge/discharge mode from the sign of the gap
            for (std::size_t i = 0; i < n; ++i) fix.push_back(net[i] < (has_wind ? wind[i] : 0.0) ? 1 : -1);
        }
        LpProblem lp;
        const auto bat = add_battery(lp, sys, n, dt, scale, soc_init, mode == 2 ? &fix : nullptr);
        std::vector<std::size_t> w, wc, pp, pn;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<std::size_t, double>> t{{bat.pd[i], 1.0}, {bat.pc[i], -1.0}};
            if (has_wind) {
                const double avail = std::max(0.0, wind[i]);
                w.push_back(lp.add_variable(0.0, 0.0, avail));
                wc.push_back(lp.add_variable(sys.wind_penalty * scale, 0.0, avail));
                lp.add_row({{w.back(), 1.0}, {wc.back(), 1.0}}, RowSense::eq, avail);
                t.emplace_back(w.back(), 1.0);
            }
            if (elastic) {
                pp.push_back(lp.add_variable(sys.price_positive * scale));
                pn.push_back(lp.add_variable(sys.price_negative * scale));
                t.emplace_back(pp.back(), 1.0);
                t.emplace_back(pn.back(), -1.0);
            }
            lp.add_row(std::move(t), RowSense::eq, net[i]);
        }
        const auto sol = solve_lp(lp);
        out.iterations += sol.iterations;
        if (sol.status != LpStatus::optimal) {
            if (mode == 0) continue;
            out.status = sol.status;
            return out;
        }
        auto pc = values(sol, bat.pc), pd = values(sol, bat.pd);
        if (!complementary(pc, pd, 1e-6, nullptr) && mode < 2) continue;
        out.status = LpStatus::optimal;
        out.pc = std::move(pc);
        out.pd = std::move(pd);
        out.soc = values(sol, bat.soc);
        out.w = has_wind ? values(sol, w) : std::vector<double>(n, 0.0);
        out.wc = has_wind ? values(sol, wc) : std::vector<double>(n, 0.0);
        out.pp = elastic ? values(sol, pp) : std::vector<double>(n, 0.0);
        out.pn = elastic ? values(sol, pn) : std::vector<double>(n, 0.0);
        out.elastic = elastic;
        out.fixed_modes = mode == 2;
        return out;
    }
    return out;
}

}  // namespace

ScheduleSolution day_ahead_schedule(std::span<const double> load, const SystemSpec& sys) {
    sys.validate();
    check_series(load, "load");
    const std::size_t n = load.size();
    ScheduleSolution s;
    s.dt = step_hours(sys, n);
    const double peak = *std::max_element(load.begin(), load.end());
    if (peak > sys.total_capacity() + sys.battery.power) {
        s.status = LpStatus::infeasible;
        s.message = "peak load exceeds generator plus battery power";
        return s;
    }
    LpProblem lp;
    const auto seg = add_generators(lp, sys, n, s.dt, 1.0);
    const auto bat = add_battery(lp, sys, n, s.dt, 1.0, sys.battery.soc_init, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::size_t, double>> t{{bat.pd[i], 1.0}, {bat.pc[i], -1.0}};
        for (const auto& g : seg) {
            for (auto v : g[i]) t.emplace_back(v, 1.0);
        }
        lp.add_row(std::move(t), RowSense::eq, load[i]);
    }
    merit_order_start(lp, seg, load);
    const auto sol = solve_lp(lp);
    s.status = sol.status;
    s.lp_iterations = sol.iterations;
    if (sol.status != LpStatus::optimal) {
        s.message = std::string("day-ahead problem is ") + status_name(sol.status);
        return s;
    }
    s.generation = read_generation(sol, seg);
    s.charge = values(sol, bat.pc);
    s.discharge = values(sol, bat.pd);
    s.soc = values(sol, bat.soc);
    s.wind_used.assign(n, 0.0);
    s.wind_curtailed.assign(n, 0.0);
    s.imbalance_pos.assign(n, 0.0);
    s.imbalance_neg.assign(n, 0.0);
    check_complementarity(s);
    generation_costs(s, sys, 1.0);
    s.cost.battery = battery_cost(sys.battery, s.charge, s.discharge, 1.0);
    s.cost.total = s.cost.generation + s.cost.battery;
    return s;
}

ScheduleSolution realtime_settle(const ScheduleSolution& da, std::span<const double> actual, const SystemSpec& sys) {
    sys.validate();
    check_series(actual, "actual load");
    if (!da.ok()) throw ValidationError("real-time settlement needs a solved day-ahead schedule");
    if (actual.size() != da.steps()) throw ValidationError("actual load and schedule differ in length");
    const std::size_t n = actual.size();
    const auto supply = da.total_generation();
    std::vector<double> net(n);
    for (std::size_t i = 0; i < n; ++i) net[i] = actual[i] - supply[i];

    ScheduleSolution s;
    s.dt = da.dt;
    s.generation = da.generation;
    const auto r = solve_stage(sys, net, {}, s.dt, 1.0, sys.battery.soc_init);
    s.status = r.status;
    s.lp_iterations = r.iterations;
    if (!s.ok()) {
        s.message = std::string("real-time problem is ") + status_name(r.status);
        return s;
    }
    s.charge = r.pc;
    s.discharge = r.pd;
    s.soc = r.soc;
    s.wind_used = r.w;
    s.wind_curtailed = r.wc;
    s.imbalance_pos = r.pp;
    s.imbalance_neg = r.pn;
    s.imbalance_fallback = r.elastic;
    if (r.elastic) {
        s.message = r.fixed_modes ? "battery cannot close the gap; residual priced as imbalance with fixed "
                                    "charge/discharge modes"
                                  : "battery cannot close the gap; residual priced as imbalance";
    }
    check_complementarity(s);
    s.cost.generation = da.cost.generation;
    s.cost.generation_quadratic = da.cost.generation_quadratic;
    s.cost.battery = battery_cost(sys.battery, s.charge, s.discharge, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        s.cost.imbalance += sys.price_positive * s.imbalance_pos[i] + sys.price_negative * s.imbalance_neg[i];
    }
    s.cost.total = s.cost.generation + s.cost.battery + s.cost.imbalance;
    return s;
}

ScheduleSolution integrated_day_ahead(std::span<const double> load, std::span<const double> wind,
                                      const SystemSpec& sys) {
    sys.validate();
    check_series(load, "load");
    check_series(wind, "wind");
    if (load.size() != wind.size()) throw ValidationError("load and wind forecasts differ in length");
    const std::size_t n = load.size();
    ScheduleSolution s;
    s.dt = step_hours(sys, n);
    LpProblem lp;
    const auto seg = add_generators(lp, sys, n, s.dt, s.dt);
    std::vector<std::size_t> w, wc;
    for (std::size_t i = 0; i < n; ++i) {
        const double avail = std::max(0.0, wind[i]);
        w.push_back(lp.add_variable(0.0, 0.0, avail));
        wc.push_back(lp.add_variable(sys.wind_penalty * s.dt, 0.0, avail));
        lp.add_row({{w.back(), 1.0}, {wc.back(), 1.0}}, RowSense::eq, avail);
        std::vector<std::pair<std::size_t, double>> t{{w.back(), 1.0}};
        for (const auto& g : seg) {
            for (auto v : g[i]) t.emplace_back(v, 1.0);
        }
        lp.add_row(std::move(t), RowSense::eq, load[i]);
    }
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = std::max(0.0, load[i] - std::max(0.0, wind[i]));
    merit_order_start(lp, seg, residual);
    for (std::size_t i = 0; i < n; ++i) lp.start[w[i]] = std::max(0.0, wind[i]);
    const auto sol = solve_lp(lp);
    s.status = sol.status;
    s.lp_iterations = sol.iterations;
    if (!s.ok()) {
        s.message = std::string("integrated day-ahead problem is ") + status_name(sol.status);
        return s;
    }
    s.generation = read_generation(sol, seg);
    s.wind_used = values(sol, w);
    s.wind_curtailed = values(sol, wc);
    s.charge.assign(n, 0.0);
    s.discharge.assign(n, 0.0);
    s.soc.assign(n, sys.battery.soc_init);
    s.imbalance_pos.assign(n, 0.0);
    s.imbalance_neg.assign(n, 0.0);
    generation_costs(s, sys, s.dt);
    for (double v : s.wind_curtailed) s.cost.curtailment += sys.wind_penalty * v * s.dt;
    s.cost.total = s.cost.generation + s.cost.curtailment;
    return s;
}

namespace {

std::vector<std::vector<double>> held_generation(const ScheduleSolution& da, std::size_t n) {
    const std::size_t coarse = da.steps();
    if (coarse == 0 || n % coarse != 0) {
        throw ValidationError("fine series length " + std::to_string(n) + " is not a multiple of the day-ahead length " +
                              std::to_string(coarse));
    }
    std::vector<std::vector<double>> g;
    for (const auto& row : da.generation) g.push_back(hold(row, n / coarse));
    return g;
}

}  // namespace

ScheduleSolution intraday_battery(const ScheduleSolution& da, std::span<const double> load,
                                  std::span<const double> wind, const SystemSpec& sys, double window_hours) {
    sys.validate();
    check_series(load, "load");
    check_series(wind, "wind");
    if (!da.ok()) throw ValidationError("intra-day scheduling needs a solved day-ahead schedule");
    if (load.size() != wind.size()) throw ValidationError("load and wind forecasts differ in length");
    const std::size_t n = load.size();
    ScheduleSolution s;
    s.dt = step_hours(sys, n);
    s.generation = held_generation(da, n);
    const double per_window = window_hours / s.dt;
    const auto w_steps = static_cast<std::size_t>(std::llround(per_window));
    if (w_steps == 0 || std::abs(per_window - static_cast<double>(w_steps)) > 1e-9 || n % w_steps != 0) {
        throw ValidationError("window of " + std::to_string(window_hours) + " h does not tile the horizon");
    }
    const auto supply = s.total_generation();
    double soc = sys.battery.soc_init;
    s.status = LpStatus::optimal;
    for (std::size_t w0 = 0, win = 0; w0 < n; w0 += w_steps, ++win) {
        std::vector<double> net(w_steps), wv(w_steps);
        for (std::size_t i = 0; i < w_steps; ++i) {
            net[i] = load[w0 + i] - supply[w0 + i];
            wv[i] = wind[w0 + i];
        }
        const auto r = solve_stage(sys, net, wv, s.dt, s.dt, soc);
        s.lp_iterations += r.iterations;
        if (r.status != LpStatus::optimal) {
            s.status = r.status;
            s.message = "intra-day window " + std::to_string(win) + " is " + status_name(r.status);
            return s;
        }
        if (r.elastic) {
            s.imbalance_fallback = true;
            if (!s.message.empty()) s.message += "; ";
            s.message += "window " + std::to_string(win) + " needed planned imbalance";
        }
        auto append = [](std::vector<double>& dst, const std::vector<double>& src) {
            dst.insert(dst.end(), src.begin(), src.end());
        };
        append(s.charge, r.pc);
        append(s.discharge, r.pd);
        append(s.soc, r.soc);
        append(s.wind_used, r.w);
        append(s.wind_curtailed, r.wc);
        append(s.imbalance_pos, r.pp);
        append(s.imbalance_neg, r.pn);
        soc = r.soc.back();
    }
    check_complementarity(s);
    generation_costs(s, sys, s.dt);
    s.cost.battery = battery_cost(sys.battery, s.charge, s.discharge, s.dt);
    for (std::size_t i = 0; i < n; ++i) {
        s.cost.curtailment += sys.wind_penalty * s.wind_curtailed[i] * s.dt;
        s.cost.imbalance += (sys.price_positive * s.imbalance_pos[i] + sys.price_negative * s.imbalance_neg[i]) * s.dt;
    }
    s.cost.total = s.cost.generation + s.cost.battery + s.cost.curtailment + s.cost.imbalance;
    return s;
}

ScheduleSolution realtime_imbalance(const ScheduleSolution& da, const ScheduleSolution& intraday,
                                    std::span<const double> load, std::span<const double> wind,
                                    const SystemSpec& sys) {
    sys.validate();
    check_series(load, "load");
    check_series(wind, "wind");
    if (!da.ok() || !intraday.ok()) throw ValidationError("real-time imbalance needs solved schedules");
    const std::size_t n = load.size();
    if (wind.size() != n || intraday.steps() != n) throw ValidationError("real-time series differ in length");
    ScheduleSolution s;
    s.status = LpStatus::optimal;
    s.dt = step_hours(sys, n);
    s.generation = held_generation(da, n);
    s.charge = intraday.charge;
    s.discharge = intraday.discharge;
    s.soc = intraday.soc;
    const auto supply = s.total_generation();
    // Using wind below the deficit saves both curtailment and shortfall; beyond
    // it, each kW saves WC but costs pi_n, so it only pays when WC > pi_n.
    const bool surplus_wind_pays = sys.wind_penalty > sys.price_negative;
    for (std::size_t i = 0; i < n; ++i) {
        const double avail = std::max(0.0, wind[i]);
        const double gap = load[i] + s.charge[i] - supply[i] - s.discharge[i];
        const double used = surplus_wind_pays ? avail : std::min(avail, std::max(gap, 0.0));
        s.wind_used.push_back(used);
        s.wind_curtailed.push_back(avail - used);
        s.imbalance_pos.push_back(std::max(gap - used, 0.0));
        s.imbalance_neg.push_back(std::max(used - gap, 0.0));
    }
    generation_costs(s, sys, s.dt);
    s.cost.battery = battery_cost(sys.battery, s.charge, s.discharge, s.dt);
    for (std::size_t i = 0; i < n; ++i) {
        s.cost.curtailment += sys.wind_penalty * s.wind_curtailed[i] * s.dt;
        s.cost.imbalance += (sys.price_positive * s.imbalance_pos[i] + sys.price_negative * s.imbalance_neg[i]) * s.dt;
    }
    s.cost.total = s.cost.generation + s.cost.battery + s.cost.curtailment + s.cost.imbalance;
    return s;
}

void write_schedule_csv(std::ostream& os, const ScheduleSolution& s) {
    using metrics::format_double;
    os << "step";
    for (std::size_t j = 0; j < s.generation.size(); ++j) os << ",P" << j + 1;
    os << ",charge,discharge,soc,wind_used,wind_curtailed,imbalance_pos,imbalance_neg\n";
    auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };
    for (std::size_t i = 0; i < s.steps(); ++i) {
        os << i;
        for (const auto& g : s.generation) os << "," << format_double(g[i]);
        os << "," << format_double(at(s.charge, i)) << "," << format_double(at(s.discharge, i)) << ","
           << format_double(at(s.soc, i)) << "," << format_double(at(s.wind_used, i)) << ","
           << format_double(at(s.wind_curtailed, i)) << "," << format_double(at(s.imbalance_pos, i)) << ","
           << format_double(at(s.imbalance_neg, i)) << "\n";
    }
}

void write_cost_summary(std::ostream& os, const ScheduleSolution& s) {
    using metrics::format_double;
    os << "status = " << status_name(s.status) << "\n"
       << "generation = " << format_double(s.cost.generation) << "\n"
       << "generation_quadratic = " << format_double(s.cost.generation_quadratic) << "\n"
       << "battery = " << format_double(s.cost.battery) << "\n"
       << "curtailment = " << format_double(s.cost.curtailment) << "\n"
       << "imbalance = " << format_double(s.cost.imbalance) << "\n"
       << "total = " << format_double(s.cost.total) << "\n"
       << "imbalance_fallback = " << (s.imbalance_fallback ? "true" : "false") << "\n";
    if (!s.message.empty()) os << "message = " << s.message << "\n";
}

}  // namespace hnl::dispatch
