#include <doctest.h>

#include "hnl/simd/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace hnl::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

void check_table(const KernelTable& t) {
    const KernelTable& ref = scalar_kernels();
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 33u, 288u, 1001u}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
        CHECK(std::abs(t.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
              1e-14 * (mag + 1.0));

        auto y1 = random_vec(rng, n);
        auto y2 = y1;
        t.axpy(0.37, a.data(), y1.data(), n);
        ref.axpy(0.37, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (std::abs(y2[i]) + 1.0));

        auto acc1 = random_vec(rng, n);
        auto acc2 = acc1;
        t.rotate_accumulate(1.3, -0.4, a.data(), b.data(), acc1.data(), n);
        ref.rotate_accumulate(1.3, -0.4, a.data(), b.data(), acc2.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(acc1[i] - acc2[i]) <= 1e-15 * (std::abs(acc2[i]) + 4.0));
        }
    }
}

}  // namespace

TEST_CASE("scalar kernels compute the documented formulas") {
    const auto& t = scalar_kernels();
    const double a[3] = {1, 2, 3};
    const double b[3] = {4, 5, 6};
    CHECK(t.dot(a, b, 3) == 32.0);
    double y[3] = {1, 1, 1};
    t.axpy(2.0, a, y, 3);
    CHECK(y[2] == 7.0);
    double acc[3] = {0, 0, 0};
    t.rotate_accumulate(2.0, 1.0, a, b, acc, 3);
    CHECK(acc[0] == 2.0 * 1 - 4.0);
    CHECK(acc[2] == 2.0 * 3 - 6.0);
}

TEST_CASE("vector kernels agree with the scalar reference") {
    if (const KernelTable* t = avx2_kernels()) {
        CHECK(t->isa == Isa::avx2);
        check_table(*t);
    }
    if (const KernelTable* t = neon_kernels()) {
        CHECK(t->isa == Isa::neon);
        check_table(*t);
    }
    const Isa before = kernels().isa;
    CHECK(force_isa(Isa::scalar));
    CHECK(kernels().isa == Isa::scalar);
    CHECK(force_isa(before));
    CHECK(isa_name(Isa::avx2) == "avx2");
}
