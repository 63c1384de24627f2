#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hnl::dispatch {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { le, eq, ge };
enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* status_name(LpStatus s);

/// min c'x + offset  s.t.  rows (<=, =, >=),  lower <= x <= upper.
/// Bounds may be infinite; a variable with both bounds infinite is free.
struct LpProblem {
    struct Row {
        std::vector<std::pair<std::size_t, double>> terms;
        RowSense sense = RowSense::eq;
        double rhs = 0.0;
    };

    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Row> rows;
    double objective_offset = 0.0;
    /// Optional starting point. Each variable starts nonbasic at the finite
    /// bound nearest its value; empty means every variable starts at its lower
    /// bound. A good start saves phase-1 pivots, it never changes the optimum.
    std::vector<double> start;

    std::size_t add_variable(double c, double lo = 0.0, double hi = kInf);
    std::size_t add_row(std::vector<std::pair<std::size_t, double>> terms, RowSense sense, double rhs);
    std::size_t variable_count() const noexcept { return cost.size(); }
    std::size_t row_count() const noexcept { return rows.size(); }
    /// Throws ValidationError on inconsistent sizes, bad indices, NaN data or lower > upper.
    void validate() const;
};

struct LpOptions {
    double tolerance = 1e-9;            ///< primal feasibility and optimality
    double pivot_tolerance = 1e-9;
    std::size_t refactor_interval = 64;
    std::size_t degenerate_limit = 50;  ///< consecutive degenerate pivots before Bland's rule
    std::size_t max_iterations = 0;     ///< 0: 50 * (rows + columns) + 1000
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
    double max_violation = 0.0;  ///< worst row or bound violation of x
};

/// Bounded revised simplex: sparse LU of the basis with product-form updates,
/// a phase-1 on artificials, Dantzig pricing and a switch to Bland's rule
/// while the method stalls on degenerate pivots.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

/// Largest violation of any row or bound by x.
double max_violation(const LpProblem& problem, std::span<const double> x);

}  // namespace hnl::dispatch
