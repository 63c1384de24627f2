#include <doctest.h>

#include "hnl/core/error.hpp"
#include "hnl/laplace/band_partition.hpp"
#include "hnl/laplace/ilt.hpp"
#include "hnl/metrics/spectrum.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

using namespace hnl;
using namespace hnl::laplace;
using cd = std::complex<double>;

namespace {

// f̄ sampled on the partition's s-grid
template <class F>
CoefficientSet sample_transform(const BandPartition& p, F fbar) {
    CoefficientSet c = zero_coefficients(p);
    for (std::size_t b = 1; b <= p.band_count(); ++b) {
        const SGrid g = make_s_grid(p, b);
        for (std::size_t j = 0; j < g.points.size(); ++j) c.bands[b - 1][j] = fbar(g.points[j]);
    }
    return c;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    return t;
}

}  // namespace

TEST_CASE("anchors follow T times resolution") {
    const std::vector<double> res{1.0, 4.0, 12.0};
    const auto p = build_band_partition(res, 24.0, 0.0);
    CHECK(p.anchors == std::vector<int>{24, 96, 288});
    for (std::size_t i = 0; i < res.size(); ++i) CHECK(p.anchors[i] / p.horizon_T == res[i]);
    CHECK(p.band_size(1) == 25);
    CHECK(p.band_size(2) == 72);
    CHECK(p.band_size(3) == 192);
    CHECK(p.resolution_index(4.0) == 1);
    CHECK(p.resolution_index(2.0) == -1);

    const std::vector<double> single{12.0};
    CHECK(build_band_partition(single, 24.0, 0.0).anchors == std::vector<int>{288});
}

TEST_CASE("partition rejects bad ladders") {
    const std::vector<double> desc{12.0, 4.0};
    CHECK_THROWS_AS(build_band_partition(desc, 24.0, 0.0), ValidationError);
    const std::vector<double> neg{-1.0, 4.0};
    CHECK_THROWS_AS(build_band_partition(neg, 24.0, 0.0), ValidationError);
    const std::vector<double> empty;
    CHECK_THROWS_AS(build_band_partition(empty, 24.0, 0.0), ValidationError);
    const std::vector<double> odd{0.7};
    CHECK_THROWS_AS(build_band_partition(odd, 24.0, 0.0), ValidationError);
    CHECK(build_band_partition(odd, 24.0, 0.0, false).anchors == std::vector<int>{17});
    CHECK_THROWS_AS(build_band_partition(std::vector<double>{1.0}, 0.0, 0.0), ValidationError);
}

TEST_CASE("s-grid points") {
    const std::vector<double> res{1.0, 4.0, 12.0};
    const auto p = build_band_partition(res, 24.0, 0.0);
    const SGrid g = make_s_grid(p, 1);
    REQUIRE(g.points.size() == 25);
    CHECK(g.points.front() == cd(0.0, 0.0));
    CHECK(std::abs(g.points.back() - cd(0.0, std::numbers::pi)) < 1e-15);
    const SGrid g3 = make_s_grid(p, 3);
    CHECK(g3.indices.front() == 97);
    CHECK(g3.indices.back() == 288);
    for (std::size_t j = 1; j < g3.points.size(); ++j) {
        CHECK(g3.points[j].imag() > g3.points[j - 1].imag());
        CHECK(g3.points[j].real() == 0.0);
    }
    CHECK_THROWS_AS(make_s_grid(p, 0), ValidationError);
    CHECK_THROWS_AS(make_s_grid(p, 4), ValidationError);

    const auto q = custom_partition(10.0, 0.5, {4});
    const SGrid h = make_s_grid(q, 1);
    CHECK(h.points[1] == cd(0.5, std::numbers::pi / 10.0));
}

TEST_CASE("zero and constant coefficients") {
    const auto p = custom_partition(10.0, 0.0, {8, 20});
    const auto t = linspace(0.0, 19.9, 50);
    auto c = zero_coefficients(p);
    for (double v : ilt_evaluate(c, 2, t, p)) CHECK(v == 0.0);

    const double level = 3.25;
    c.bands[0][0] = cd(2.0 * level * p.horizon_T, 0.0);
    for (double v : ilt_evaluate(c, 2, t, p)) CHECK(v == doctest::Approx(level).epsilon(1e-14));
}

TEST_CASE("single coefficient gives a cosine at k/2T") {
    const double T = 10.0;
    const auto p = custom_partition(T, 0.0, {8, 20});
    auto c = zero_coefficients(p);
    const int k = 13;
    c.bands[1][static_cast<std::size_t>(k - p.band_first(2))] = cd(T, 0.0);
    const auto t = linspace(0.0, 19.9, 71);
    const auto tc = temporal_components(c, t, p);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(tc.components[0][i] == 0.0);
        CHECK(tc.components[1][i] == doctest::Approx(std::cos(k * std::numbers::pi * t[i] / T)).epsilon(1e-12));
    }
}

TEST_CASE("temporal components sum bit-exactly to the reconstruction") {
    const std::vector<double> res{1.0, 4.0, 12.0};
    const auto p = build_band_partition(res, 24.0, 0.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    auto c = zero_coefficients(p);
    for (auto& band : c.bands) {
        for (auto& v : band) v = cd(d(rng), d(rng));
    }
    std::vector<double> t(288);
    for (std::size_t n = 0; n < t.size(); ++n) t[n] = (n + 0.5) / 12.0;
    const auto full = ilt_evaluate(c, 3, t, p);
    const auto tc = temporal_components(c, t, p);
    for (std::size_t n = 0; n < t.size(); ++n) {
        double s = 0.0;
        for (const auto& comp : tc.components) s += comp[n];
        CHECK(s == full[n]);
    }
}

TEST_CASE("reconstruction is linear") {
    const auto p = custom_partition(10.0, 0.3, {40});
    std::mt19937_64 rng(11);
    std::normal_distribution<double> d;
    auto a = zero_coefficients(p);
    auto b = zero_coefficients(p);
    auto mix = zero_coefficients(p);
    const double alpha = 0.7;
    const double beta = -1.9;
    for (std::size_t j = 0; j < a.bands[0].size(); ++j) {
        a.bands[0][j] = cd(d(rng), d(rng));
        b.bands[0][j] = cd(d(rng), d(rng));
        mix.bands[0][j] = alpha * a.bands[0][j] + beta * b.bands[0][j];
    }
    const auto t = linspace(0.0, 19.5, 40);
    const auto fa = ilt_evaluate(a, 1, t, p);
    const auto fb = ilt_evaluate(b, 1, t, p);
    const auto fm = ilt_evaluate(mix, 1, t, p);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double expect = alpha * fa[i] + beta * fb[i];
        CHECK(std::abs(fm[i] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }
}

TEST_CASE("evaluation window and coefficient checks") {
    const auto p = custom_partition(10.0, 0.0, {8});
    auto c = zero_coefficients(p);
    CHECK_THROWS_AS(ilt_evaluate(c, 1, std::vector<double>{20.0}, p), ValidationError);
    CHECK_THROWS_AS(ilt_evaluate(c, 1, std::vector<double>{-0.1}, p), ValidationError);
    CHECK_THROWS_AS(ilt_evaluate(c, 2, std::vector<double>{1.0}, p), ValidationError);
    c.bands[0][3] = cd(std::nan(""), 0.0);
    CHECK_THROWS_AS(ilt_evaluate(c, 1, std::vector<double>{1.0}, p), ValidationError);
}

TEST_CASE("analytic Laplace pairs reconstruct on the interior window") {
    // Plain Fourier-series inversion converges like O(1/N) near the ends of
    // the period; these bounds are what N = 256 actually achieves.
    const double T = 10.0;
    const auto t = linspace(0.5, 19.0, 300);
    {
        const auto p = custom_partition(T, crump_gamma(-1.0, T), {256});
        const auto c = sample_transform(p, [](cd s) { return 1.0 / (s + 1.0); });
        const auto f = ilt_evaluate(c, 1, t, p);
        double err = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) err = std::max(err, std::abs(f[i] - std::exp(-t[i])));
        CHECK(err < 1e-2);
    }
    {
        // 1/s on [1, 10] with a moderate contour
        const auto p = custom_partition(T, 0.2, {256});
        const auto c = sample_transform(p, [](cd s) { return 1.0 / s; });
        const auto ti = linspace(1.0, 10.0, 200);
        const auto f = ilt_evaluate(c, 1, ti, p);
        double err = 0.0;
        for (double v : f) err = std::max(err, std::abs(v - 1.0));
        CHECK(err < 5e-2);
    }
}

TEST_CASE("reconstruction error falls as N grows") {
    const double T = 10.0;
    const auto t = linspace(2.0, 15.0, 100);
    double prev = 1e300;
    for (int N : {64, 256, 1024}) {
        const auto p = custom_partition(T, 0.5, {N});
        const auto c = sample_transform(p, [](cd s) { return 2.0 / (s * s + 4.0); });
        const auto f = ilt_evaluate(c, 1, t, p);
        double err = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) err = std::max(err, std::abs(f[i] - std::sin(2.0 * t[i])));
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("truncation at anchor N leaves no content above N/2T") {
    const double T = 24.0;
    const std::vector<double> res{1.0, 4.0, 12.0};
    const auto p = build_band_partition(res, T, 0.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    auto c = zero_coefficients(p);
    for (auto& band : c.bands) {
        for (auto& v : band) v = cd(d(rng), d(rng));
    }
    // full period [0, 2T) oversampled at 4 * 12 samples per hour
    const double fs = 48.0;
    std::vector<double> t(static_cast<std::size_t>(2 * T * fs));
    for (std::size_t n = 0; n < t.size(); ++n) t[n] = n / fs;
    for (std::size_t band = 1; band <= 3; ++band) {
        const auto f = ilt_evaluate(c, band, t, p);
        const auto spec = metrics::dft_amplitudes(f, fs);
        const double cutoff = p.anchors[band - 1] / (2.0 * T);
        double peak = 0.0;
        double above = 0.0;
        for (std::size_t k = 0; k < spec.amplitudes.size(); ++k) {
            peak = std::max(peak, spec.amplitudes[k]);
            if (spec.frequencies[k] > cutoff + 1e-12) above = std::max(above, spec.amplitudes[k]);
        }
        CHECK(peak > 1e-3);
        CHECK(above <= 1e-9);
    }
}

TEST_CASE("adjoint matches the forward map") {
    const auto p = custom_partition(10.0, 0.1, {6, 15});
    const auto t = linspace(0.0, 19.0, 37);
    const IltBasis basis(p, t);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> d;
    std::vector<cd> coeffs(p.band_size(2));
    for (auto& v : coeffs) v = cd(d(rng), d(rng));
    std::vector<double> w(t.size());
    for (double& x : w) x = d(rng);
    std::vector<double> out(t.size());
    basis.component(2, coeffs, out);
    double lhs = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) lhs += w[i] * out[i];
    std::vector<double> gr(coeffs.size()), gi(coeffs.size());
    basis.component_adjoint(2, w, gr, gi);
    double rhs = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) rhs += gr[j] * coeffs[j].real() + gi[j] * coeffs[j].imag();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("forward Laplace oracle on analytic pairs") {
    const double h = 0.001;
    std::vector<double> t(static_cast<std::size_t>(50.0 / h) + 1);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = i * h;
    std::vector<double> one(t.size(), 1.0), ex(t.size()), sn(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        ex[i] = std::exp(-t[i]);
        sn[i] = std::sin(t[i]);
    }
    auto r1 = numeric_forward_laplace(t, one, cd(1.0, 0.0));
    CHECK(std::abs(r1.value - cd(1.0, 0.0)) < 1e-4);
    CHECK_FALSE(r1.non_decaying);
    CHECK(std::abs(numeric_forward_laplace(t, ex, cd(1.0, 0.0)).value - cd(0.5, 0.0)) < 1e-4);
    CHECK(std::abs(numeric_forward_laplace(t, sn, cd(1.0, 0.0)).value - cd(0.5, 0.0)) < 1e-3);
    CHECK(numeric_forward_laplace(t, one, cd(0.0, 1.0)).non_decaying);
    CHECK_THROWS_AS(numeric_forward_laplace(std::vector<double>{0.0}, std::vector<double>{1.0}, cd(1, 0)),
                    ValidationError);
}
