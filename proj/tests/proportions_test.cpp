#include <doctest.h>

#include <cmath>
#include <random>

#include "migprop/proportions.hpp"

using namespace migprop;

TEST_CASE("proportion_axis: full-domain target normalizes to exactly 1") {
    for (double s : {0.01, 0.4, 12.0})
        CHECK(proportion_axis(0.2, 0.7, 0.0, 1.0, 0.13, s, 1.0) == 1.0);
}

TEST_CASE("proportion_axis: uniform limit halves the domain") {
    const double L = 1.0, s = 10.0;
    for (double a : {0.0, 0.3, 0.7})
        CHECK(std::abs(proportion_axis(a, a + 0.25, 0.0, 0.5, 0.0, s, L) - 0.5) < 1e-6);
}

TEST_CASE("proportion_axis: mirror symmetry at zero drift") {
    // A_i symmetric about L/2; A_f vs its mirror image agree to image-sum
    // truncation accuracy
    const double L = 1.0;
    for (double s : {0.05, 0.3, 2.0}) {
        const double w1 = proportion_axis(0.25, 0.75, 0.125, 0.4375, 0.0, s, L);
        const double w2 = proportion_axis(0.25, 0.75, 1.0 - 0.4375, 1.0 - 0.125, 0.0, s, L);
        CHECK(std::abs(w1 - w2) <= 1e-12 * std::max(w1, w2));
    }
}

TEST_CASE("proportion_axis: monotone in the final interval") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const double L = 1.0 + 2.0 * u(rng);
        const double s = L * L * (0.02 + u(rng));
        const double shift = (u(rng) - 0.5) * 0.5 * L;
        double a = u(rng) * 0.5 * L, b = a + 0.3 * L;
        double c = u(rng) * 0.5 * L, d = c + u(rng) * 0.3 * L;
        const double grow = u(rng) * std::min(c, L - d);
        const double w_small = proportion_axis(a, b, c, d, shift, s, L);
        const double w_big = proportion_axis(a, b, c - grow, d + grow, shift, s, L);
        CHECK(w_big >= w_small - 1e-12);
    }
}

TEST_CASE("proportion_axis: time-reversal detailed balance at zero drift") {
    const double L = 1.3, s = 0.21;
    const double na = nx_if(0.1, 0.5, 0.0, L, 0.0, s, L);
    const double nb = nx_if(0.7, 1.2, 0.0, L, 0.0, s, L);
    const double wab = proportion_axis(0.1, 0.5, 0.7, 1.2, 0.0, s, L);
    const double wba = proportion_axis(0.7, 1.2, 0.1, 0.5, 0.0, s, L);
    CHECK(std::abs(wab * na - wba * nb) <= 1e-10 * std::abs(wab * na));
}

TEST_CASE("migration_proportion basics") {
    const DomainRect domain(1.0, 1.0);
    PlanarParams p;
    p.d_x = p.d_y = 10.0;
    const AreaRect omega("omega", 0.0, 1.0, 0.0, 1.0);
    const AreaRect quarter("q", 0.0, 0.5, 0.0, 0.5);
    CHECK(migration_proportion(quarter, omega, p, 1.0, domain) == 1.0);
    CHECK(std::abs(migration_proportion(quarter, quarter, p, 1.0, domain) - 0.25) < 3e-6);

    const AreaRect outside("bad", 0.5, 1.5, 0.0, 1.0);
    CHECK_THROWS_AS(migration_proportion(quarter, outside, p, 1.0, domain), argument_error);
    PlanarParams zero = p;
    zero.d_x = 0.0;
    CHECK_THROWS_WITH_AS(migration_proportion(quarter, omega, zero, 1.0, domain),
                         doctest::Contains("diffusion parameter must be positive"),
                         numeric_error);
}

TEST_CASE("proportion_matrix: single full-domain column") {
    const DomainRect domain(2.0, 1.0);
    PlanarParams p;
    p.d_x = p.d_y = 0.2;
    p.beta_x = 0.1;
    const std::vector<AreaRect> initial = {{"a", 0.0, 0.5, 0.0, 1.0},
                                           {"b", 0.5, 2.0, 0.2, 0.8}};
    const std::vector<AreaRect> omega = {{"omega", 0.0, 2.0, 0.0, 1.0}};
    const auto m = proportion_matrix(initial, omega, p, 1.0, domain, {}, true);
    for (const auto& row : m.entries) {
        REQUIRE(row.size() == 1);
        CHECK(row[0] == 1.0);
    }
}

TEST_CASE("proportion_matrix: 2x2 uniform partition") {
    const DomainRect domain(1.0, 1.0);
    PlanarParams p;
    p.d_x = p.d_y = 10.0;
    const std::vector<AreaRect> quads = {{"q00", 0.0, 0.5, 0.0, 0.5},
                                         {"q10", 0.5, 1.0, 0.0, 0.5},
                                         {"q01", 0.0, 0.5, 0.5, 1.0},
                                         {"q11", 0.5, 1.0, 0.5, 1.0}};
    const auto m = proportion_matrix(quads, quads, p, 1.0, domain, {}, true);
    for (const auto& row : m.entries)
        for (double w : row) CHECK(std::abs(w - 0.25) < 3e-6);
    for (double rs : m.row_sums) CHECK(std::abs(rs - 1.0) <= 1e-10);
}

TEST_CASE("proportion_matrix: random 3x3 partitions sum rows to 1") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> cut(0.1, 0.9);
    for (int rep = 0; rep < 3; ++rep) {
        double cx[2] = {cut(rng), cut(rng)}, cy[2] = {cut(rng), cut(rng)};
        if (cx[0] > cx[1]) std::swap(cx[0], cx[1]);
        if (cy[0] > cy[1]) std::swap(cy[0], cy[1]);
        const double xs[4] = {0.0, cx[0], cx[1], 1.0};
        const double ys[4] = {0.0, cy[0], cy[1], 1.0};
        std::vector<AreaRect> tiles;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                tiles.emplace_back("t" + std::to_string(3 * a + b), xs[a], xs[a + 1], ys[b],
                                   ys[b + 1]);
        PlanarParams p;
        p.beta_x = 0.2;
        p.beta_y = -0.15;
        p.d_x = 0.3;
        p.d_y = 0.7;
        const auto m = proportion_matrix(tiles, tiles, p, 1.0, DomainRect(1.0, 1.0), {},
                                         true);
        for (double rs : m.row_sums) CHECK(std::abs(rs - 1.0) <= 1e-10);
    }
}

TEST_CASE("proportion_matrix rejects overlapping partitions") {
    const std::vector<AreaRect> bad = {{"a", 0.0, 0.6, 0.0, 1.0}, {"b", 0.5, 1.0, 0.0, 1.0}};
    PlanarParams p;
    p.d_x = p.d_y = 1.0;
    CHECK_THROWS_AS(proportion_matrix(bad, bad, p, 1.0, DomainRect(1.0, 1.0), {}, true),
                    argument_error);
}

TEST_CASE("area invariants") {
    CHECK_THROWS_AS(AreaRect("r", 0.5, 0.5, 0.0, 1.0), argument_error);
    CHECK_THROWS_AS(AreaRect("r", -0.1, 0.5, 0.0, 1.0), argument_error);
    const AreaRect a("r", 0.0, 0.5, 0.0, 1.0);
    CHECK_THROWS_AS(a.validate_in(DomainRect(0.4, 1.0)), argument_error);
}
