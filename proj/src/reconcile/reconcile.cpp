#include "hnl/reconcile/reconcile.hpp"

#include "hnl/core/error.hpp"
#include "hnl/metrics/downsample.hpp"

#include <cmath>
#include <string>

namespace hnl::reconcile {

AggregationMatrix build_aggregation(const std::vector<std::size_t>& lengths) {
    if (lengths.empty()) throw ValidationError("aggregation needs at least one level");
    const std::size_t base = lengths.back();
    AggregationMatrix a;
    a.lengths = lengths;
    std::size_t total = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (lengths[i] == 0 || (i > 0 && lengths[i] <= lengths[i - 1])) {
            throw ValidationError("level lengths must be positive and strictly ascending");
        }
        if (base % lengths[i] != 0) {
            throw ValidationError("level length " + std::to_string(lengths[i]) + " does not divide base length " +
                                  std::to_string(base));
        }
        a.ratios.push_back(base / lengths[i]);
        total += lengths[i];
    }
    a.S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(base));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const std::size_t r = a.ratios[i];
        for (std::size_t b = 0; b < lengths[i]; ++b, ++row) {
            for (std::size_t k = 0; k < r; ++k) a.S(row, static_cast<Eigen::Index>(b * r + k)) = 1.0 / static_cast<double>(r);
        }
    }
    return a;
}

AggregationMatrix build_aggregation(const std::vector<double>& resolutions, double horizon_hours) {
    std::vector<std::size_t> lengths;
    for (double r : resolutions) {
        const double n = r * horizon_hours;
        if (!(n >= 1.0) || std::abs(n - std::round(n)) > 1e-9) {
            throw ValidationError("horizon x resolution is not a whole number of steps");
        }
        lengths.push_back(static_cast<std::size_t>(std::llround(n)));
    }
    return build_aggregation(lengths);
}

Eigen::VectorXd stack(const metrics::Bundle& b) {
    std::size_t total = 0;
    for (const auto& l : b.levels) total += l.size();
    Eigen::VectorXd y(static_cast<Eigen::Index>(total));
    Eigen::Index pos = 0;
    for (const auto& l : b.levels) {
        for (double v : l) y(pos++) = v;
    }
    return y;
}

metrics::Bundle unstack(const Eigen::VectorXd& y, const metrics::Bundle& shape) {
    metrics::Bundle out;
    out.resolutions = shape.resolutions;
    Eigen::Index pos = 0;
    for (const auto& l : shape.levels) {
        std::vector<double> v(l.size());
        for (double& x : v) x = y(pos++);
        out.levels.push_back(std::move(v));
    }
    return out;
}

metrics::Bundle bu_reconcile(const metrics::Bundle& bundle) {
    if (bundle.levels.empty() || bundle.levels.back().empty()) {
        throw ValidationError("bottom-up reconciliation needs the highest-resolution forecast");
    }
    if (bundle.levels.size() != bundle.resolutions.size()) throw ValidationError("bundle shape mismatch");
    metrics::Bundle out = bundle;
    const std::size_t top = bundle.levels.size() - 1;
    for (std::size_t i = 0; i < top; ++i) out.levels[i] = metrics::ladder_downsample(bundle, top, i);
    return out;
}

OptReconciler::OptReconciler(const AggregationMatrix& agg, Weighting weighting) : agg_(agg) {
    const Eigen::Index rows = agg.S.rows();
    Eigen::VectorXd winv = Eigen::VectorXd::Ones(rows);
    if (weighting == Weighting::structural) {
        Eigen::Index row = 0;
        for (std::size_t i = 0; i < agg.lengths.size(); ++i) {
            for (std::size_t b = 0; b < agg.lengths[i]; ++b) winv(row++) = 1.0 / static_cast<double>(agg.ratios[i]);
        }
    }
    const Eigen::MatrixXd StWinv = agg.S.transpose() * winv.asDiagonal();
    const Eigen::MatrixXd normal = StWinv * agg.S;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) throw NumericError("reconciliation normal matrix is singular");
    P_ = agg.S * llt.solve(StWinv);
}

metrics::Bundle OptReconciler::apply(const metrics::Bundle& bundle) const {
    if (bundle.levels.size() != agg_.lengths.size()) {
        throw ValidationError("bundle has " + std::to_string(bundle.levels.size()) + " levels, expected " +
                              std::to_string(agg_.lengths.size()));
    }
    for (std::size_t i = 0; i < bundle.levels.size(); ++i) {
        if (bundle.levels[i].size() != agg_.lengths[i]) throw ValidationError("bundle level length mismatch");
    }
    const Eigen::VectorXd y = P_ * stack(bundle);
    return unstack(y, bundle);
}

metrics::Bundle opt_reconcile(const metrics::Bundle& bundle, Weighting weighting) {
    std::vector<std::size_t> lengths;
    for (const auto& l : bundle.levels) lengths.push_back(l.size());
    return OptReconciler(build_aggregation(lengths), weighting).apply(bundle);
}

}  // namespace hnl::reconcile
