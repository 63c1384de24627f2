#include <doctest.h>

#include "hnl/core/error.hpp"
#include "hnl/metrics/downsample.hpp"
#include "hnl/reconcile/reconcile.hpp"

#include <random>

using namespace hnl;
using namespace hnl::reconcile;
using metrics::Bundle;

namespace {

Bundle random_bundle(std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 3.0);
    Bundle b{{1.0, 4.0, 12.0}, {std::vector<double>(24), std::vector<double>(96), std::vector<double>(288)}};
    for (auto& l : b.levels) {
        for (double& v : l) v = d(rng);
    }
    return b;
}

Bundle consistent_bundle(std::mt19937_64& rng) {
    Bundle b = random_bundle(rng);
    return bu_reconcile(b);
}

double max_diff(const Bundle& a, const Bundle& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        for (std::size_t k = 0; k < a.levels[i].size(); ++k) m = std::max(m, std::abs(a.levels[i][k] - b.levels[i][k]));
    }
    return m;
}

}  // namespace

TEST_CASE("aggregation matrix structure") {
    const auto a = build_aggregation(std::vector<std::size_t>{24, 96, 288});
    CHECK(a.S.rows() == 408);
    CHECK(a.S.cols() == 288);
    CHECK(a.ratios == std::vector<std::size_t>{12, 3, 1});
    for (Eigen::Index r = 0; r < a.S.rows(); ++r) CHECK(a.S.row(r).sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k < 12; ++k) CHECK(a.S(0, k) == 1.0 / 12.0);
    CHECK(a.S(0, 12) == 0.0);
    CHECK(a.S.bottomRows(288).isIdentity());
    CHECK_THROWS_AS(build_aggregation(std::vector<std::size_t>{24, 100}), ValidationError);
    CHECK(build_aggregation(std::vector<double>{1.0, 4.0, 12.0}, 24.0).lengths == std::vector<std::size_t>{24, 96, 288});
}

TEST_CASE("bottom-up") {
    std::mt19937_64 rng(1);
    const Bundle b = random_bundle(rng);
    const Bundle r = bu_reconcile(b);
    CHECK(r.levels[2] == b.levels[2]);
    CHECK(metrics::tce(r) == 0.0);
    Bundle c{{1.0, 12.0}, {std::vector<double>(24, 9.0), std::vector<double>(288, 2.0)}};
    const Bundle rc = bu_reconcile(c);
    for (double v : rc.levels[0]) CHECK(v == 2.0);
    CHECK_THROWS_AS(bu_reconcile(Bundle{}), ValidationError);
}

TEST_CASE("optimal reconciliation is a projection onto the coherent subspace") {
    std::mt19937_64 rng(2);
    for (Weighting w : {Weighting::identity, Weighting::structural}) {
        const auto agg = build_aggregation(std::vector<std::size_t>{24, 96, 288});
        const OptReconciler opt(agg, w);
        for (int trial = 0; trial < 50; ++trial) {
            const Bundle b = random_bundle(rng);
            const Bundle once = opt.apply(b);
            const Bundle twice = opt.apply(once);
            CHECK(max_diff(once, twice) <= 1e-10);
            CHECK(metrics::tce(once) <= 1e-8);
            // linearity
            const Bundle b2 = random_bundle(rng);
            Bundle sum = b;
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t k = 0; k < sum.levels[i].size(); ++k) sum.levels[i][k] = 2.0 * b.levels[i][k] - b2.levels[i][k];
            }
            const Bundle ps = opt.apply(sum);
            const Bundle p2 = opt.apply(b2);
            double err = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t k = 0; k < sum.levels[i].size(); ++k) {
                    err = std::max(err, std::abs(ps.levels[i][k] - (2.0 * once.levels[i][k] - p2.levels[i][k])));
                }
            }
            CHECK(err <= 1e-10);
        }
        const Bundle c = consistent_bundle(rng);
        CHECK(max_diff(opt.apply(c), c) <= 1e-10);
    }
    const Bundle b = random_bundle(rng);
    CHECK(max_diff(opt_reconcile(b), OptReconciler(build_aggregation(std::vector<std::size_t>{24, 96, 288}),
                                                   Weighting::identity).apply(b)) == 0.0);
    Bundle wrong = b;
    wrong.levels[1].pop_back();
    CHECK_THROWS_AS(opt_reconcile(wrong), ValidationError);
}

TEST_CASE("constant bundles survive reconciliation") {
    Bundle p{{1.0, 4.0, 12.0}, {std::vector<double>(24, 5.0), std::vector<double>(96, 5.0), std::vector<double>(288, 5.0)}};
    CHECK(max_diff(bu_reconcile(p), p) == 0.0);
    CHECK(max_diff(opt_reconcile(p), p) <= 1e-10);
}
