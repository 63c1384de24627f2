#include "hnl/dispatch/lp.hpp"

#include "hnl/core/error.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace hnl::dispatch {

const char* status_name(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

std::size_t LpProblem::add_variable(double c, double lo, double hi) {
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return cost.size() - 1;
}

std::size_t LpProblem::add_row(std::vector<std::pair<std::size_t, double>> terms, RowSense sense, double rhs) {
    rows.push_back({std::move(terms), sense, rhs});
    return rows.size() - 1;
}

void LpProblem::validate() const {
    const std::size_t n = cost.size();
    if (lower.size() != n || upper.size() != n) throw ValidationError("lp: bound vectors do not match the cost vector");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(cost[j])) throw ValidationError("lp: non-finite cost for variable " + std::to_string(j));
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] || lower[j] == kInf ||
            upper[j] == -kInf) {
            throw ValidationError("lp: invalid bounds for variable " + std::to_string(j));
        }
    }
    if (!start.empty() && start.size() != n) throw ValidationError("lp: start vector does not match the cost vector");
    for (double v : start) {
        if (std::isnan(v)) throw ValidationError("lp: NaN in the start vector");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!std::isfinite(rows[i].rhs)) throw ValidationError("lp: non-finite rhs in row " + std::to_string(i));
        for (const auto& [j, a] : rows[i].terms) {
            if (j >= n) throw ValidationError("lp: row " + std::to_string(i) + " references a missing variable");
            if (!std::isfinite(a)) throw ValidationError("lp: non-finite coefficient in row " + std::to_string(i));
        }
    }
}

double max_violation(const LpProblem& p, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < p.variable_count(); ++j) {
        worst = std::max({worst, p.lower[j] - x[j], x[j] - p.upper[j]});
    }
    for (const auto& row : p.rows) {
        double ax = 0.0;
        for (const auto& [j, a] : row.terms) ax += a * x[j];
        const double d = ax - row.rhs;
        if (row.sense == RowSense::le) worst = std::max(worst, d);
        else if (row.sense == RowSense::ge) worst = std::max(worst, -d);
        else worst = std::max(worst, std::abs(d));
    }
    return worst;
}

namespace {

enum class State : std::uint8_t { basic, lower, upper, zero };

struct Column {
    std::vector<int> idx;
    std::vector<double> val;
};

struct Eta {
    std::size_t r;
    double pivot;
    std::vector<int> idx;
    std::vector<double> val;
};

enum class PhaseResult { optimal, unbounded, iteration_limit };

class Simplex {
public:
    Simplex(const LpProblem& p, const LpOptions& o) : problem_(p), opt_(o) {
        m_ = p.row_count();
        nstruct_ = p.variable_count();
        build_columns();
        limit_ = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + cols_.size()) + 1000;
    }

    LpSolution run() {
        LpSolution sol;
        initial_basis();
        refactor();

        if (artificial_begin_ < cols_.size()) {
            std::vector<double> c1(cols_.size(), 0.0);
            for (std::size_t j = artificial_begin_; j < cols_.size(); ++j) c1[j] = 1.0;
            const auto r = iterate(c1);
            if (r == PhaseResult::iteration_limit) return finish(sol, LpStatus::iteration_limit);
            double infeas = 0.0;
            for (std::size_t j = artificial_begin_; j < cols_.size(); ++j) infeas += std::max(0.0, x_[j]);
            if (infeas > opt_.tolerance * (1.0 + bmax_)) return finish(sol, LpStatus::infeasible);
            // artificials stay in the problem pinned at zero
            for (std::size_t j = artificial_begin_; j < cols_.size(); ++j) {
                hi_[j] = 0.0;
                if (state_[j] != State::basic) {
                    state_[j] = State::lower;
                    x_[j] = 0.0;
                }
            }
            recompute_basics();
        }

        const auto r = iterate(cost_);
        if (r == PhaseResult::unbounded) return finish(sol, LpStatus::unbounded);
        if (r == PhaseResult::iteration_limit) return finish(sol, LpStatus::iteration_limit);
        refactor();
        return finish(sol, LpStatus::optimal);
    }

private:
    void build_columns() {
        std::vector<std::map<int, double>> acc(nstruct_);
        b_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& row = problem_.rows[i];
            b_[i] = row.rhs;
            bmax_ = std::max(bmax_, std::abs(row.rhs));
            for (const auto& [j, a] : row.terms) acc[j][static_cast<int>(i)] += a;
        }
        for (std::size_t j = 0; j < nstruct_; ++j) {
            Column c;
            for (const auto& [i, a] : acc[j]) {
                if (a == 0.0) continue;
                c.idx.push_back(i);
                c.val.push_back(a);
            }
            cols_.push_back(std::move(c));
            lo_.push_back(problem_.lower[j]);
            hi_.push_back(problem_.upper[j]);
            cost_.push_back(problem_.cost[j]);
        }
        slack_of_row_.assign(m_, -1);
        for (std::size_t i = 0; i < m_; ++i) {
            const auto sense = problem_.rows[i].sense;
            if (sense == RowSense::eq) continue;
            slack_of_row_[i] = static_cast<long>(cols_.size());
            cols_.push_back({{static_cast<int>(i)}, {sense == RowSense::le ? 1.0 : -1.0}});
            lo_.push_back(0.0);
            hi_.push_back(kInf);
            cost_.push_back(0.0);
        }
    }

    void initial_basis() {
        x_.assign(cols_.size(), 0.0);
        state_.assign(cols_.size(), State::lower);
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            const bool hinted = j < nstruct_ && !problem_.start.empty();
            if (hinted && std::isfinite(lo_[j]) && std::isfinite(hi_[j]) &&
                hi_[j] - problem_.start[j] < problem_.start[j] - lo_[j]) {
                x_[j] = hi_[j];
                state_[j] = State::upper;
            } else if (std::isfinite(lo_[j])) {
                x_[j] = lo_[j];
                state_[j] = State::lower;
            } else if (std::isfinite(hi_[j])) {
                x_[j] = hi_[j];
                state_[j] = State::upper;
            } else {
                x_[j] = 0.0;
                state_[j] = State::zero;
            }
        }
        std::vector<double> r = b_;
        for (std::size_t j = 0; j < nstruct_; ++j) {
            if (x_[j] == 0.0) continue;
            for (std::size_t k = 0; k < cols_[j].idx.size(); ++k) r[cols_[j].idx[k]] -= cols_[j].val[k] * x_[j];
        }
        basis_.assign(m_, 0);
        artificial_begin_ = cols_.size();
        std::vector<std::size_t> need;
        for (std::size_t i = 0; i < m_; ++i) {
            const long s = slack_of_row_[i];
            if (s >= 0 && r[i] / cols_[s].val[0] >= 0.0) {
                basis_[i] = static_cast<std::size_t>(s);
                state_[s] = State::basic;
                x_[s] = r[i] / cols_[s].val[0];
            } else {
                need.push_back(i);
            }
        }
        for (std::size_t i : need) {
            const std::size_t j = cols_.size();
            cols_.push_back({{static_cast<int>(i)}, {r[i] >= 0.0 ? 1.0 : -1.0}});
            lo_.push_back(0.0);
            hi_.push_back(kInf);
            cost_.push_back(0.0);
            x_.push_back(std::abs(r[i]));
            state_.push_back(State::basic);
            basis_[i] = j;
        }
    }

    void refactor() {
        etas_.clear();
        if (m_ == 0) return;
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t p = 0; p < m_; ++p) {
            const auto& c = cols_[basis_[p]];
            for (std::size_t k = 0; k < c.idx.size(); ++k) trip.emplace_back(c.idx[k], static_cast<int>(p), c.val[k]);
        }
        Eigen::SparseMatrix<double> B(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        B.setFromTriplets(trip.begin(), trip.end());
        B.makeCompressed();
        lu_.analyzePattern(B);
        lu_.factorize(B);
        if (lu_.info() != Eigen::Success) throw NumericError("lp: singular basis during refactorization");
        recompute_basics();
    }

    void recompute_basics() {
        if (m_ == 0) return;
        std::vector<double> r = b_;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (state_[j] == State::basic || x_[j] == 0.0) continue;
            for (std::size_t k = 0; k < cols_[j].idx.size(); ++k) r[cols_[j].idx[k]] -= cols_[j].val[k] * x_[j];
        }
        ftran(r);
        for (std::size_t p = 0; p < m_; ++p) x_[basis_[p]] = r[p];
    }

    void ftran(std::vector<double>& v) const {
        Eigen::Map<Eigen::VectorXd> mv(v.data(), static_cast<Eigen::Index>(m_));
        Eigen::VectorXd s = lu_.solve(mv);
        mv = s;
        for (const auto& e : etas_) {
            const double vr = v[e.r] / e.pivot;
            if (vr != 0.0) {
                for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * vr;
            }
            v[e.r] = vr;
        }
    }

    void btran(std::vector<double>& y) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = y[it->r];
            for (std::size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * y[it->idx[k]];
            y[it->r] = s / it->pivot;
        }
        Eigen::Map<Eigen::VectorXd> my(y.data(), static_cast<Eigen::Index>(m_));
        Eigen::VectorXd s = lu_.transpose().solve(my);
        my = s;
    }

    PhaseResult iterate(const std::vector<double>& c) {
        const double tol = opt_.tolerance;
        std::size_t degenerate = 0;
        std::vector<double> y(m_), alpha(m_);
        for (;;) {
            if (iterations_ >= limit_) return PhaseResult::iteration_limit;
            if (etas_.size() >= opt_.refactor_interval) refactor();
            const bool bland = degenerate >= opt_.degenerate_limit;

            for (std::size_t p = 0; p < m_; ++p) y[p] = c[basis_[p]];
            if (m_ > 0) btran(y);

            // pricing
            std::size_t q = cols_.size();
            double best = 0.0;
            int dir = 0;
            for (std::size_t j = 0; j < cols_.size(); ++j) {
                const State s = state_[j];
                if (s == State::basic || lo_[j] == hi_[j]) continue;
                double d = c[j];
                const auto& col = cols_[j];
                for (std::size_t k = 0; k < col.idx.size(); ++k) d -= y[col.idx[k]] * col.val[k];
                int jd = 0;
                if (d < -tol && (s == State::lower || s == State::zero)) jd = 1;
                else if (d > tol && (s == State::upper || s == State::zero)) jd = -1;
                if (jd == 0) continue;
                if (bland) {
                    q = j;
                    dir = jd;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = jd;
                }
            }
            if (q == cols_.size()) return PhaseResult::optimal;

            std::fill(alpha.begin(), alpha.end(), 0.0);
            for (std::size_t k = 0; k < cols_[q].idx.size(); ++k) alpha[cols_[q].idx[k]] = cols_[q].val[k];
            if (m_ > 0) ftran(alpha);

            // ratio test (two-pass with a tolerance band unless Bland's rule is active)
            const double ptol = opt_.pivot_tolerance;
            auto ratio = [&](std::size_t p, bool relaxed) {
                const std::size_t j = basis_[p];
                const double g = dir * alpha[p];
                const double slack = relaxed ? tol : 0.0;
                if (g > ptol && std::isfinite(lo_[j])) return (x_[j] - lo_[j] + slack) / g;
                if (g < -ptol && std::isfinite(hi_[j])) return (hi_[j] - x_[j] + slack) / -g;
                return kInf;
            };
            std::size_t leave = m_;
            double theta = kInf;
            if (bland) {
                for (std::size_t p = 0; p < m_; ++p) theta = std::min(theta, ratio(p, false));
                if (theta < kInf) {
                    for (std::size_t p = 0; p < m_; ++p) {
                        if (ratio(p, false) <= theta + 1e-12 && (leave == m_ || basis_[p] < basis_[leave])) leave = p;
                    }
                    theta = ratio(leave, false);
                }
            } else {
                double bound = kInf;
                for (std::size_t p = 0; p < m_; ++p) bound = std::min(bound, ratio(p, true));
                if (bound < kInf) {
                    double big = 0.0;
                    for (std::size_t p = 0; p < m_; ++p) {
                        const double t = ratio(p, false);
                        if (t <= bound && std::abs(alpha[p]) > big) {
                            big = std::abs(alpha[p]);
                            leave = p;
                            theta = t;
                        }
                    }
                }
            }
            if (theta < 0.0) theta = 0.0;
            const double range = hi_[q] - lo_[q];
            const bool flip = std::isfinite(range) && range <= theta;
            if (flip) theta = range;
            if (theta == kInf) return PhaseResult::unbounded;

            ++iterations_;
            degenerate = theta <= tol ? degenerate + 1 : 0;
            if (theta > 0.0) {
                for (std::size_t p = 0; p < m_; ++p) x_[basis_[p]] -= dir * theta * alpha[p];
            }
            if (flip) {
                state_[q] = dir > 0 ? State::upper : State::lower;
                x_[q] = dir > 0 ? hi_[q] : lo_[q];
                continue;
            }
            x_[q] += dir * theta;
            const std::size_t out = basis_[leave];
            const double g = dir * alpha[leave];
            if (g > 0.0) {
                state_[out] = State::lower;
                x_[out] = lo_[out];
            } else {
                state_[out] = State::upper;
                x_[out] = hi_[out];
            }
            basis_[leave] = q;
            state_[q] = State::basic;
            Eta e{leave, alpha[leave], {}, {}};
            for (std::size_t p = 0; p < m_; ++p) {
                if (p != leave && alpha[p] != 0.0) {
                    e.idx.push_back(static_cast<int>(p));
                    e.val.push_back(alpha[p]);
                }
            }
            etas_.push_back(std::move(e));
        }
    }

    LpSolution& finish(LpSolution& sol, LpStatus status) {
        sol.status = status;
        sol.iterations = iterations_;
        sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(nstruct_));
        if (status == LpStatus::optimal) {
            // snap basics that drifted inside the tolerance back onto their bounds
            for (std::size_t j = 0; j < nstruct_; ++j) {
                if (sol.x[j] < problem_.lower[j]) sol.x[j] = problem_.lower[j];
                if (sol.x[j] > problem_.upper[j]) sol.x[j] = problem_.upper[j];
            }
        }
        sol.objective = problem_.objective_offset;
        for (std::size_t j = 0; j < nstruct_; ++j) sol.objective += problem_.cost[j] * sol.x[j];
        sol.max_violation = max_violation(problem_, sol.x);
        return sol;
    }

    const LpProblem& problem_;
    LpOptions opt_;
    std::size_t m_ = 0, nstruct_ = 0, artificial_begin_ = 0, limit_ = 0, iterations_ = 0;
    double bmax_ = 0.0;
    std::vector<Column> cols_;
    std::vector<double> lo_, hi_, cost_, b_, x_;
    std::vector<State> state_;
    std::vector<long> slack_of_row_;
    std::vector<std::size_t> basis_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
    problem.validate();
    Simplex s(problem, options);
    return s.run();
}

}  // namespace hnl::dispatch
