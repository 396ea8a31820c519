#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ks/grid.hpp"

using namespace ks;
using std::numbers::pi;

namespace {

Field random_field(const GridPtr& g, std::uint64_t seed, double lo = -1.0, double hi = 2.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f(g);
    for (int k = 0; k < f.size(); ++k) f[k] = dist(rng);
    return f;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("weight sums equal the domain measure") {
    const auto rect = Grid::rectangle(pi, pi, 64, 64);
    CHECK(std::fabs(rect->weight_sum() - pi * pi) <= 1e-12 * pi * pi);

    const auto disk = Grid::radial_disk(1.0, 128);
    CHECK(std::fabs(disk->weight_sum() - pi) <= 1e-10);

    const auto big = Grid::rectangle(2.5, 0.7, 512, 256);
    CHECK(std::fabs(big->weight_sum() - 2.5 * 0.7) <= 1e-12 * 2.5 * 0.7);
}

TEST_CASE("construction rejects bad parameters") {
    CHECK_THROWS_AS((void)Grid::rectangle(-1.0, 1.0, 64, 64), config_error);
    CHECK_THROWS_AS((void)Grid::rectangle(1.0, 1.0, 3, 64), config_error);
    CHECK_THROWS_AS((void)Grid::radial_disk(0.0, 64), config_error);
    CHECK_THROWS_AS((void)Grid::radial_disk(1.0, 2), config_error);
}

TEST_CASE("integrate: constants, symmetry, linearity") {
    const auto g = Grid::rectangle(pi, pi, 128, 128);
    CHECK(std::fabs(integrate(Field(g, 1.0)) - pi * pi) <= 1e-12 * pi * pi);

    Field cosx(g);
    for (int j = 0; j < g->ny(); ++j)
        for (int i = 0; i < g->nx(); ++i) cosx.at(i, j) = std::cos(g->x(i));
    CHECK(std::fabs(integrate(cosx)) <= 1e-10);

    const Field f = random_field(g, 1);
    const Field h = random_field(g, 2);
    Field combo(g);
    for (int k = 0; k < f.size(); ++k) combo[k] = 1.3 * f[k] - 0.7 * h[k];
    const double lhs = integrate(combo);
    const double rhs = 1.3 * integrate(f) - 0.7 * integrate(h);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * (std::fabs(lhs) + std::fabs(rhs) + 1.0));
}

TEST_CASE("lp_norm basics and monotonicity") {
    const auto g = Grid::rectangle(pi, pi, 128, 128);
    const Field two(g, 2.0);
    CHECK(lp_norm(two, 2.0) == doctest::Approx(2.0 * pi).epsilon(1e-13));
    CHECK(lp_norm(two, std::numeric_limits<double>::infinity()) == 2.0);
    CHECK_THROWS_AS((void)lp_norm(two, 0.5), domain_error);

    Field cosx(g);
    for (int j = 0; j < g->ny(); ++j)
        for (int i = 0; i < g->nx(); ++i) cosx.at(i, j) = std::cos(g->x(i));
    CHECK(lp_norm(cosx, 2.0) == doctest::Approx(std::sqrt(pi * pi / 2.0)).epsilon(1e-6));

    // Hoelder: ||f||_p <= ||f||_q |Omega|^(1/p - 1/q) for p <= q.
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const Field f = random_field(g, seed);
        for (const auto& [p, q] : {std::pair{1.0, 2.0}, {2.0, 4.0}, {1.5, 3.7}}) {
            const double bound = lp_norm(f, q) * std::pow(g->area(), 1.0 / p - 1.0 / q);
            CHECK(lp_norm(f, p) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("presets") {
    const auto g = Grid::rectangle(pi, pi, 128, 128);

    SUBCASE("constant") {
        PresetParams prm;
        prm.c = 1.0;
        const Field f = sample_initial("constant", prm, g);
        CHECK(f[0] == 1.0);
        CHECK(f[f.size() - 1] == 1.0);
    }
    SUBCASE("cosine perturbed constant matches the formula and stays nonnegative") {
        PresetParams p;
        p.base = 1.0;
        p.amp = 0.5;
        p.mode_x = 1;
        p.mode_y = 0;
        const Field f = sample_initial("cosine_perturbed_constant", p, g);
        double mn = 1e300;
        for (int j = 0; j < g->ny(); ++j)
            for (int i = 0; i < g->nx(); ++i) {
                CHECK(f.at(i, j) ==
                      doctest::Approx(1.0 + 0.5 * std::cos(g->x(i))).epsilon(1e-14));
                mn = std::min(mn, f.at(i, j));
            }
        CHECK(mn >= 0.5 - 1e-12);

        p.amp = 1.5;
        CHECK_THROWS_AS((void)sample_initial("cosine_perturbed_constant", p, g), config_error);
    }
    SUBCASE("gaussian bump hits target mass; peak grows as width shrinks") {
        const double target = 4.0 * pi * 0.9;
        double prev_linf = 0.0;
        for (const double w : {0.2, 0.1, 0.05}) {
            PresetParams p;
            p.width = w;
            p.target_mass = target;
            const Field f = sample_initial("gaussian_bump", p, g);
            CHECK(std::fabs(integrate(f) - target) <= 1e-8 * target);
            const double linf = lp_norm(f, std::numeric_limits<double>::infinity());
            CHECK(linf > prev_linf);
            prev_linf = linf;
        }
    }
    SUBCASE("radial gaussian") {
        const auto disk = Grid::radial_disk(1.0, 128);
        PresetParams p;
        p.width = 0.1;
        p.target_mass = 2.0;
        const Field f = sample_initial("radial_gaussian", p, disk);
        CHECK(std::fabs(integrate(f) - 2.0) <= 1e-8 * 2.0);
        CHECK_THROWS_AS((void)sample_initial("radial_gaussian", p, g), config_error);
    }
    SUBCASE("unknown preset") {
        CHECK_THROWS_AS((void)sample_initial("vortex", PresetParams{}, g), config_error);
    }
}

TEST_CASE("field invariants") {
    const auto g = Grid::rectangle(1.0, 1.0, 8, 8);
    CHECK_THROWS_AS((void)Field(g, std::vector<double>(7, 0.0)), structural_error);
    Field f(g, 1.0);
    f[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(f.check_finite(), domain_error);
}

TEST_CASE("snapshot round trip preserves bits") {
    const auto g = Grid::rectangle(pi, 1.7, 12, 9);
    const Field f = random_field(g, 77);
    std::ostringstream out;
    write_snapshot(out, f, 0.125);
    std::istringstream in(out.str());
    const Snapshot s = read_snapshot(in);
    CHECK(s.t == 0.125);
    REQUIRE(s.field.size() == f.size());
    for (int k = 0; k < f.size(); ++k) CHECK(s.field[k] == f[k]);
    CHECK(s.field.grid()->same_layout(*g));

    const auto disk = Grid::radial_disk(2.0, 16);
    const Field fr = random_field(disk, 78);
    std::ostringstream out2;
    write_snapshot(out2, fr, 3.5);
    std::istringstream in2(out2.str());
    const Snapshot s2 = read_snapshot(in2);
    for (int k = 0; k < fr.size(); ++k) CHECK(s2.field[k] == fr[k]);
}

}  // TEST_SUITE
