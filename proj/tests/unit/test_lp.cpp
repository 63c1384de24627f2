#include <doctest.h>

#include "hnl/core/error.hpp"
#include "hnl/dispatch/lp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <random>

using namespace hnl;
using namespace hnl::dispatch;

namespace {

// Brute-force oracle: every basic solution of the constraint system (rows
// and finite bounds taken as equalities n at a time) that is feasible; the
// best objective among them. Requires a bounded feasible region.
std::optional<double> enumerate_vertices(const LpProblem& p) {
    const std::size_t n = p.variable_count();
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    std::vector<bool> must;
    for (const auto& row : p.rows) {
        std::vector<double> a(n, 0.0);
        for (const auto& [j, v] : row.terms) a[j] += v;
        A.push_back(a);
        b.push_back(row.rhs);
        must.push_back(row.sense == RowSense::eq);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (double bound : {p.lower[j], p.upper[j]}) {
            if (!std::isfinite(bound)) continue;
            std::vector<double> a(n, 0.0);
            a[j] = 1.0;
            A.push_back(a);
            b.push_back(bound);
            must.push_back(false);
        }
    }
    const std::size_t k = A.size();
    std::optional<double> best;
    std::vector<std::size_t> pick(n);
    // iterate over n-subsets in lexicographic order
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    if (k < n) return best;
    for (;;) {
        bool has_all_eq = true;
        for (std::size_t r = 0; r < k; ++r) {
            if (must[r] && std::find(pick.begin(), pick.end(), r) == pick.end()) has_all_eq = false;
        }
        if (has_all_eq) {
            Eigen::MatrixXd M(n, n);
            Eigen::VectorXd rhs(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) M(i, j) = A[pick[i]][j];
                rhs(i) = b[pick[i]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            if (lu.rank() == static_cast<Eigen::Index>(n)) {
                const Eigen::VectorXd x = lu.solve(rhs);
                std::vector<double> xv(x.data(), x.data() + n);
                if (max_violation(p, xv) <= 1e-9) {
                    double obj = p.objective_offset;
                    for (std::size_t j = 0; j < n; ++j) obj += p.cost[j] * xv[j];
                    if (!best || obj < *best) best = obj;
                }
            }
        }
        std::size_t i = n;
        while (i > 0 && pick[i - 1] == k - n + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

LpProblem random_lp(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nv(2, 6), nr(1, 6), sense(0, 5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> small(-3, 3);
    LpProblem p;
    const int n = nv(rng), m = nr(rng);
    for (int j = 0; j < n; ++j) {
        // mix of box kinds; every variable bounded so the oracle is complete
        const double lo = sense(rng) == 0 ? -2.0 + u(rng) : 0.0;
        p.add_variable(small(rng) + 0.5 * u(rng), lo, 4.0 + 2.0 * u(rng));
    }
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<std::size_t, double>> terms;
        for (int j = 0; j < n; ++j) {
            if (u(rng) > -0.4) terms.emplace_back(j, small(rng) + 0.25 * u(rng));
        }
        const int s = sense(rng);
        const RowSense rs = s < 3 ? RowSense::le : (s < 5 ? RowSense::ge : RowSense::eq);
        p.add_row(std::move(terms), rs, 3.0 * u(rng) + (rs == RowSense::le ? 2.0 : 0.0));
    }
    return p;
}

}  // namespace

TEST_CASE("lp: facet optimum") {
    LpProblem p;
    const auto x = p.add_variable(-1.0), y = p.add_variable(-1.0);
    p.add_row({{x, 1.0}, {y, 1.0}}, RowSense::le, 1.0);
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(s.x[x] + s.x[y] == doctest::Approx(1.0));
    CHECK(s.max_violation <= 1e-9);
}

TEST_CASE("lp: infeasible and unbounded are reported") {
    LpProblem a;
    const auto x = a.add_variable(1.0, -kInf, kInf);
    a.add_row({{x, 1.0}}, RowSense::ge, 1.0);
    a.add_row({{x, 1.0}}, RowSense::le, 0.0);
    CHECK(solve_lp(a).status == LpStatus::infeasible);

    LpProblem b;
    const auto u = b.add_variable(-1.0), v = b.add_variable(0.0);
    b.add_row({{u, 1.0}, {v, -1.0}}, RowSense::le, 1.0);
    CHECK(solve_lp(b).status == LpStatus::unbounded);

    LpProblem c;
    c.add_variable(1.0, 2.0, 1.0);
    CHECK_THROWS_AS(solve_lp(c), ValidationError);
}

TEST_CASE("lp: equality rows, free variables and negative bounds") {
    // min x + 2y - z, x + y + z = 3, x - y >= -1, z <= 2, x free, y in [-1, 5]
    LpProblem p;
    const auto x = p.add_variable(1.0, -kInf, kInf);
    const auto y = p.add_variable(2.0, -1.0, 5.0);
    const auto z = p.add_variable(-1.0, 0.0, 2.0);
    p.add_row({{x, 1.0}, {y, 1.0}, {z, 1.0}}, RowSense::eq, 3.0);
    p.add_row({{x, 1.0}, {y, -1.0}}, RowSense::ge, -1.0);
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    // x = 3 - y - z gives 3 + y - 2z with 2y <= 4 - z: y = -1, z = 2, x = 2
    CHECK(s.objective == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(s.x[x] == doctest::Approx(2.0));
    CHECK(s.x[y] == doctest::Approx(-1.0));
    CHECK(s.x[z] == doctest::Approx(2.0));
    CHECK(s.max_violation <= 1e-9);
}

TEST_CASE("lp: objective matches vertex enumeration on random instances") {
    std::mt19937_64 rng(20240601);
    int optimal = 0, infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        CAPTURE(trial);
        const auto p = random_lp(rng);
        const auto oracle = enumerate_vertices(p);
        const auto s = solve_lp(p);
        if (!oracle) {
            CHECK(s.status == LpStatus::infeasible);
            ++infeasible;
            continue;
        }
        REQUIRE(s.status == LpStatus::optimal);
        CHECK(std::abs(s.objective - *oracle) <= 1e-8);
        CHECK(s.max_violation <= 1e-9);
        ++optimal;
    }
    CHECK(optimal >= 50);
    CHECK(infeasible >= 1);
}

TEST_CASE("lp: a starting point never changes the answer") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        CAPTURE(trial);
        auto p = random_lp(rng);
        const auto oracle = enumerate_vertices(p);
        p.start.resize(p.variable_count());
        for (std::size_t j = 0; j < p.start.size(); ++j) {
            p.start[j] = p.lower[j] + unit(rng) * (p.upper[j] - p.lower[j]);
        }
        const auto s = solve_lp(p);
        if (!oracle) {
            CHECK(s.status == LpStatus::infeasible);
            continue;
        }
        REQUIRE(s.status == LpStatus::optimal);
        CHECK(std::abs(s.objective - *oracle) <= 1e-8);
    }
    LpProblem bad;
    bad.add_variable(1.0);
    bad.start = {0.0, 1.0};
    CHECK_THROWS_AS(solve_lp(bad), ValidationError);
}

TEST_CASE("lp: degenerate instance terminates") {
    // classic cycling example under Dantzig pricing without safeguards
    LpProblem p;
    const auto x1 = p.add_variable(-0.75), x2 = p.add_variable(150.0), x3 = p.add_variable(-0.02),
               x4 = p.add_variable(6.0);
    p.add_row({{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, RowSense::le, 0.0);
    p.add_row({{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, RowSense::le, 0.0);
    p.add_row({{x3, 1.0}}, RowSense::le, 1.0);
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(std::abs(*enumerate_vertices(p) - s.objective) <= 1e-12);
}

TEST_CASE("lp: larger sparse problem stays feasible") {
    // transport-like chain: storage recursion with bounds, like the dispatch models
    LpProblem p;
    const int n = 400;
    std::vector<std::size_t> g, s;
    for (int i = 0; i < n; ++i) {
        g.push_back(p.add_variable(1.0 + 0.5 * std::sin(0.1 * i), 0.0, 3.0));
        s.push_back(p.add_variable(0.0, 0.0, 5.0));
    }
    for (int i = 0; i < n; ++i) {
        // s_i = s_{i-1} + g_i - d_i
        const double d = 1.5 + std::cos(0.05 * i);
        std::vector<std::pair<std::size_t, double>> t{{s[i], 1.0}, {g[i], -1.0}};
        if (i > 0) t.emplace_back(s[i - 1], -1.0);
        p.add_row(std::move(t), RowSense::eq, -d + (i == 0 ? 2.0 : 0.0));
    }
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.max_violation <= 1e-9);
}
