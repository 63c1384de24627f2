#pragma once

#include "hnl/metrics/metrics.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hnl::reconcile {

/// Stacked block-mean map from the finest level (length n_m) to all levels,
/// coarsest first. Rows of level i average r_i = n_m / n_i consecutive entries.
struct AggregationMatrix {
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> ratios;
    Eigen::MatrixXd S;
};

/// lengths ascending, each dividing the last one.
AggregationMatrix build_aggregation(const std::vector<std::size_t>& lengths);
/// Level lengths horizon * f_r^i for a resolution ladder.
AggregationMatrix build_aggregation(const std::vector<double>& resolutions, double horizon_hours);

enum class Weighting { identity, structural };

/// Replace every coarser level by block means of the finest one.
metrics::Bundle bu_reconcile(const metrics::Bundle& bundle);

/// GLS projection y~ = S (S' W^-1 S)^-1 S' W^-1 y. Structural weighting uses
/// W = diag(r_i), the aggregation ratio of each row's level.
class OptReconciler {
public:
    OptReconciler(const AggregationMatrix& agg, Weighting weighting);
    metrics::Bundle apply(const metrics::Bundle& bundle) const;
    const Eigen::MatrixXd& projection() const noexcept { return P_; }

private:
    AggregationMatrix agg_;
    Eigen::MatrixXd P_;
};

metrics::Bundle opt_reconcile(const metrics::Bundle& bundle, Weighting weighting = Weighting::identity);

Eigen::VectorXd stack(const metrics::Bundle& bundle);
metrics::Bundle unstack(const Eigen::VectorXd& y, const metrics::Bundle& shape);

}  // namespace hnl::reconcile
