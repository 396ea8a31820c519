#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ks/kernels.hpp"

using namespace ks;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double lo = -2.0,
                               double hi = 3.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar-vs-simd equivalence") {
    if (!kernels::avx2_available()) {
        MESSAGE("AVX2 unavailable; equivalence suite reduced to scalar self-check");
        return;
    }
#ifdef KS_HAVE_AVX2
    const auto& sc = kernels::scalar_table();
    const auto& vx = kernels::avx2_table();
    // Sizes straddling the vector width, including remainders.
    for (const std::size_t n : {1ul, 3ul, 4ul, 5ul, 17ul, 64ul, 1000ul, 16384ul, 16387ul}) {
        const auto a = random_vec(n, 11 * n + 1);
        const auto b = random_vec(n, 13 * n + 7);
        const auto w = random_vec(n, 17 * n + 3, 0.1, 1.5);

        SUBCASE("reductions agree to reassociation tolerance") {
            const double tol = 1e-13;
            CHECK(std::fabs(sc.sum(a.data(), n) - vx.sum(a.data(), n)) <=
                  tol * (1.0 + std::fabs(sc.sum(a.data(), n))) * std::sqrt(double(n)));
            CHECK(std::fabs(sc.dot(a.data(), b.data(), n) - vx.dot(a.data(), b.data(), n)) <=
                  tol * sc.sum_abs(a.data(), n) * 3.0);
            CHECK(std::fabs(sc.wdot(a.data(), b.data(), w.data(), n) -
                            vx.wdot(a.data(), b.data(), w.data(), n)) <=
                  tol * sc.sum_abs(a.data(), n) * 5.0);
            CHECK(std::fabs(sc.sum_abs(a.data(), n) - vx.sum_abs(a.data(), n)) <=
                  tol * sc.sum_abs(a.data(), n));
        }

        SUBCASE("order-free reductions agree exactly") {
            CHECK(sc.abs_max(a.data(), n) == vx.abs_max(a.data(), n));
            CHECK(sc.abs_max_diff(a.data(), b.data(), n) == vx.abs_max_diff(a.data(), b.data(), n));
            CHECK(sc.min(a.data(), n) == vx.min(a.data(), n));
            CHECK(sc.max(a.data(), n) == vx.max(a.data(), n));
        }

        SUBCASE("element-wise kernels agree bit for bit") {
            auto y1 = b, y2 = b;
            sc.axpy(y1.data(), 1.7, a.data(), n);
            vx.axpy(y2.data(), 1.7, a.data(), n);
            CHECK(y1 == y2);

            auto p1 = b, p2 = b;
            sc.zpbp(p1.data(), a.data(), -0.3, n);
            vx.zpbp(p2.data(), a.data(), -0.3, n);
            CHECK(p1 == p2);

            std::vector<double> o1(n), o2(n);
            sc.scale(o1.data(), std::acos(-1.0), a.data(), n);
            vx.scale(o2.data(), std::acos(-1.0), a.data(), n);
            CHECK(o1 == o2);

            auto s1 = a, s2 = a;
            sc.add_scalar(s1.data(), -0.776, n);
            vx.add_scalar(s2.data(), -0.776, n);
            CHECK(s1 == s2);

            auto c1 = a, c2 = a;
            sc.clip_negative(c1.data(), n);
            vx.clip_negative(c2.data(), n);
            CHECK(c1 == c2);
            for (const double x : c1) CHECK(x >= 0.0);
        }
    }
#endif
}

#ifdef KS_HAVE_AVX2
TEST_CASE("stencil apply is bit-identical across backends") {
    if (!kernels::avx2_available()) return;
    const auto& sc = kernels::scalar_table();
    const auto& vx = kernels::avx2_table();
    for (const auto& [nx, ny] : {std::pair{4, 4}, {5, 7}, {33, 9}, {64, 64}, {129, 5}}) {
        const auto x = random_vec(static_cast<std::size_t>(nx) * ny, 1000 + nx * ny);
        std::vector<double> o1(x.size()), o2(x.size());
        sc.screened_apply_rect(o1.data(), x.data(), nx, ny, 3.25, 17.0, 5.0);
        vx.screened_apply_rect(o2.data(), x.data(), nx, ny, 3.25, 17.0, 5.0);
        CHECK(o1 == o2);
    }
}
#endif

TEST_CASE("dispatch respects force()") {
    kernels::force(kernels::Backend::scalar);
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::force(kernels::Backend::auto_detect);
    if (kernels::avx2_available()) CHECK(std::string(kernels::active().name) == "avx2");
}

TEST_CASE("repeated reductions are deterministic") {
    const auto a = random_vec(10007, 42);
    const auto& k = kernels::active();
    const double s1 = k.sum(a.data(), a.size());
    const double s2 = k.sum(a.data(), a.size());
    CHECK(s1 == s2);
}

}  // TEST_SUITE
