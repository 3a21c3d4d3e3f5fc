#include <doctest.h>

#include <cmath>
#include <random>

#include "migprop/math_util.hpp"
#include "migprop/model.hpp"

using namespace migprop;

namespace {

TrackSeries make_track(const std::vector<double>& t, const std::vector<double>& x,
                       const std::vector<double>& y, const std::string& id = "a") {
    std::vector<TrackObservation> obs;
    for (std::size_t i = 0; i < t.size(); ++i) obs.push_back({id, t[i], x[i], y[i]});
    return TrackSeries(id, std::move(obs));
}

}  // namespace

TEST_CASE("extract_increments basic arithmetic") {
    auto track = make_track({0, 1, 2}, {0, 2, 4}, {1, 1, 1});
    auto [ix, iy] = extract_increments(track);
    REQUIRE(ix.n() == 2);
    CHECK(ix.deltas()[0].dv == 2.0);
    CHECK(ix.deltas()[1].dv == 2.0);
    CHECK(ix.deltas()[0].dt == 1.0);
    CHECK(iy.deltas()[0].dv == 0.0);
}

TEST_CASE("non-increasing time is rejected with the offending index") {
    std::vector<TrackObservation> obs = {{"a", 0, 0, 0}, {"a", 1, 1, 1}, {"a", 1, 2, 2}};
    CHECK_THROWS_WITH_AS(TrackSeries("a", std::move(obs)),
                         doctest::Contains("non-increasing time at index 2"), data_error);
}

TEST_CASE("telescoping: compensated increment sum reproduces the endpoint difference") {
    std::mt19937_64 rng(915);
    std::normal_distribution<double> step(0.0, 3.0);
    std::uniform_real_distribution<double> dt(0.01, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> t{0.0}, x{500.0 + 10.0 * rep}, y{800.0};
        for (int i = 0; i < 400; ++i) {
            t.push_back(t.back() + dt(rng));
            x.push_back(x.back() + step(rng));
            y.push_back(y.back() + step(rng));
        }
        auto track = make_track(t, x, y);
        auto [ix, iy] = extract_increments(track);
        CHECK(ix.total_dv() == x.back() - x.front());
        CHECK(iy.total_dv() == y.back() - y.front());
        const auto s = summarize_path(track);
        CHECK(s.delta_x == x.back() - x.front());
        CHECK(s.n == 400);
    }
}

TEST_CASE("integrate_diffusion") {
    const auto c = DiffusionLaw::constant(0.5);
    CHECK(integrate_diffusion(c, 0.0, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    const auto pw = DiffusionLaw::piecewise({0.0, 1.0}, {1.0, 3.0});
    CHECK(integrate_diffusion(pw, 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(integrate_diffusion(pw, 0.5, 1.5) == doctest::Approx(0.5 + 1.5).epsilon(1e-15));
    CHECK(integrate_diffusion(pw, -1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrate_diffusion(c, 2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(integrate_diffusion(c, 1.0, 0.0), argument_error);
    CHECK_THROWS_AS(DiffusionLaw::piecewise({1.0, 0.0}, {1.0, 1.0}), argument_error);
    CHECK_THROWS_AS(DiffusionLaw::piecewise({0.0, 1.0}, {1.0, 0.0}), argument_error);
}

TEST_CASE("obs_increment_cov band structure") {
    const auto law = DiffusionLaw::constant(1.0);
    const ErrorCumulants err(0.25, 0.0, 0.0);
    const std::vector<double> dt = {2.0, 2.0, 2.0, 2.0};
    CHECK(obs_increment_cov(1, 1, law, err, dt) == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(obs_increment_cov(2, 3, law, err, dt) == -0.25);
    CHECK(obs_increment_cov(1, 3, law, err, dt) == 0.0);
    CHECK_THROWS_AS(obs_increment_cov(0, 1, law, err, dt), argument_error);
    CHECK_THROWS_AS(obs_increment_cov(1, 5, law, err, dt), argument_error);

    // time-dependent D uses the interval's own integral
    const auto pw = DiffusionLaw::piecewise({0.0, 2.0}, {1.0, 2.0});
    CHECK(obs_increment_cov(2, 2, pw, err, dt) ==
          doctest::Approx(2.0 * 4.0 + 0.5).epsilon(1e-15));
}

TEST_CASE("joint_cumulant_obs sign pattern") {
    const ErrorCumulants err(0.25, 1.5, 5.0);
    CHECK(joint_cumulant_obs(3, 4, 4, 3, err) == 0.0);          // odd order, i == j
    CHECK(joint_cumulant_obs(4, 4, 4, 4, err) == 10.0);         // 2 k4
    CHECK(joint_cumulant_obs(4, 4, 3, 2, err) == 5.0);          // j = i-1, a_i even
    CHECK(joint_cumulant_obs(4, 4, 3, 3, err) == -5.0);         // j = i-1, a_i odd
    CHECK(joint_cumulant_obs(4, 4, 5, 1, err) == -5.0);         // j = i+1, a_j = 3
    CHECK(joint_cumulant_obs(3, 4, 5, 2, err) == -1.5);         // j = i+1, a_j = 1
    CHECK(joint_cumulant_obs(4, 2, 5, 2, err) == 0.0);          // |i-j| >= 2
    CHECK(joint_cumulant_obs(3, 9, 2, 1, err) == 0.0);
    CHECK_THROWS_AS(joint_cumulant_obs(2, 1, 1, 1, err), argument_error);
    CHECK_THROWS_AS(joint_cumulant_obs(5, 1, 1, 2, err), argument_error);
}

TEST_CASE("joint_cumulant_obs vanishes for all gaps >= 2") {
    const ErrorCumulants err(0.3, 0.7, 2.0);
    for (int a = 3; a <= 4; ++a)
        for (std::size_t i = 5; i <= 9; ++i)
            for (std::size_t j = 1; j <= 12; ++j) {
                if (i == j || j + 1 == i || j == i + 1) continue;
                for (int ai = 0; ai <= a; ++ai)
                    CHECK(joint_cumulant_obs(a, i, j, ai, err) == 0.0);
            }
}

TEST_CASE("deltaX_cumulants") {
    const auto law = DiffusionLaw::constant(1.0);
    const std::vector<double> dt = {1.0, 1.0, 1.0};

    SUBCASE("closed values") {
        const ErrorCumulants err(0.1, 0.0, 0.0);
        const auto c = deltaX_cumulants(3, law, dt, 0.5, err);
        CHECK(c.k1 == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(c.k2 == doctest::Approx(6.2).epsilon(1e-15));
        CHECK(c.k3 == 0.0);
        CHECK(c.k4 == 0.0);  // gaussian errors
    }
    SUBCASE("k4 follows the telescoped error pair for any n") {
        const ErrorCumulants err(0.1, 0.0, 3.0);
        CHECK(deltaX_cumulants(1, law, {2.0}, 0.0, err).k4 == 6.0);
        CHECK(deltaX_cumulants(3, law, dt, 0.0, err).k4 == 6.0);
    }
    SUBCASE("monte carlo: fourth cumulant of n=1 noisy displacement") {
        // brute-force oracle for k4(dx + e1 - e0) with uniform noise
        std::mt19937_64 rng(77);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double a = 1.0;  // uniform half-width; k4_eps = -2 a^4 / 15
        std::uniform_real_distribution<double> eps(-a, a);
        const double d = 0.5, dt1 = 1.0;
        const std::size_t batches = 40, per_batch = 25000;
        std::vector<double> k4s;
        std::vector<double> sample(per_batch);
        for (std::size_t b = 0; b < batches; ++b) {
            for (auto& v : sample)
                v = std::sqrt(2.0 * d * dt1) * normal(rng) + eps(rng) - eps(rng);
            const auto m = compute_moments(sample);
            const double m2 = m.var * (per_batch - 1.0) / per_batch;
            k4s.push_back(m.exkurt * m2 * m2);
        }
        const double se = sample_sd(k4s) / std::sqrt(static_cast<double>(batches));
        const ErrorCumulants err(a * a / 3.0, 0.0, -2.0 * a * a * a * a / 15.0);
        const double expected = deltaX_cumulants(1, law, {dt1}, 0.0, err).k4;
        CHECK(expected == doctest::Approx(2.0 * (-2.0 / 15.0)).epsilon(1e-12));
        CHECK(std::abs(sample_mean(k4s) - expected) < 4.0 * se);
    }
}

TEST_CASE("standardize_increments") {
    SUBCASE("deterministic path centers to zero") {
        std::vector<Increment> d;
        for (int i = 1; i <= 10; ++i) d.push_back({0.7 * (0.1 * i), 0.1 * i});
        IncrementSeries incs(Axis::x, d);
        for (double u : standardize_increments(incs, 0.7, 1.3, false, 0.0)) CHECK(u == 0.0);
    }
    SUBCASE("scale invariance") {
        std::vector<Increment> d = {{0.4, 0.5}, {-0.2, 1.5}, {1.1, 0.25}};
        IncrementSeries incs(Axis::x, d);
        const double c = 37.0;
        std::vector<Increment> scaled;
        for (const auto& v : d) scaled.push_back({c * v.dv, v.dt});
        IncrementSeries sc(Axis::x, scaled);
        const auto u1 = standardize_increments(incs, 0.3, 0.8, false, 0.0);
        const auto u2 = standardize_increments(sc, c * 0.3, c * c * 0.8, false, 0.0);
        for (std::size_t i = 0; i < u1.size(); ++i)
            CHECK(u1[i] == doctest::Approx(u2[i]).epsilon(1e-12));
    }
    SUBCASE("unit variance under the true model") {
        std::mt19937_64 rng(4242);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double beta = 0.4, d_true = 1.2, sigma0_sq = 0.09;
        std::uniform_real_distribution<double> dts(0.05, 1.0);
        std::vector<Increment> deltas;
        double eps_prev = std::sqrt(sigma0_sq) * normal(rng);
        for (int i = 0; i < 10000; ++i) {
            const double dt = dts(rng);
            const double eps = std::sqrt(sigma0_sq) * normal(rng);
            deltas.push_back(
                {beta * dt + std::sqrt(2.0 * d_true * dt) * normal(rng) + eps - eps_prev,
                 dt});
            eps_prev = eps;
        }
        IncrementSeries incs(Axis::x, deltas);
        const auto u = standardize_increments(incs, beta, d_true, true, sigma0_sq);
        CHECK(std::abs(compute_moments(u).var - 1.0) < 0.05);
    }
    SUBCASE("non-positive diffusion rejected") {
        IncrementSeries incs(Axis::x, {{1.0, 1.0}, {0.0, 1.0}});
        CHECK_THROWS_AS(standardize_increments(incs, 0.0, 0.0, false, 0.0), numeric_error);
    }
}

TEST_CASE("error cumulant and law invariants") {
    CHECK_THROWS_AS(ErrorCumulants(-1.0, 0.0, 0.0), argument_error);
    CHECK_THROWS_AS(DiffusionLaw::constant(-2.0), argument_error);
    CHECK(DiffusionLaw::constant(0.0).integrate(0.0, 5.0) == 0.0);
}
