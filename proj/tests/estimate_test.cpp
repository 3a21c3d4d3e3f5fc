#include <doctest.h>

#include <cmath>
#include <random>

#include "migprop/estimate.hpp"
#include "migprop/math_util.hpp"
#include "migprop/simulate.hpp"

using namespace migprop;

namespace {

IncrementSeries series_from(const std::vector<double>& dv, const std::vector<double>& dt) {
    std::vector<Increment> d;
    for (std::size_t i = 0; i < dv.size(); ++i) d.push_back({dv[i], dt[i]});
    return IncrementSeries(Axis::x, std::move(d));
}

TrackSeries track_linear(double slope, std::size_t n, double dt, const std::string& id) {
    std::vector<TrackObservation> obs;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = dt * static_cast<double>(i);
        obs.push_back({id, t, slope * t, -slope * t});
    }
    return TrackSeries(id, std::move(obs));
}

}  // namespace

TEST_CASE("group_intervals") {
    SUBCASE("exact matching makes singletons") {
        auto g = group_intervals(series_from({1, 1, 1}, {1, 2, 3}), 0.0);
        REQUIRE(g.size() == 3);
        for (const auto& grp : g) CHECK(grp.weight == doctest::Approx(1.0 / 3));
        CHECK(g[0].representative_dt == 1.0);
        CHECK(g[2].representative_dt == 3.0);
    }
    SUBCASE("repeats count into one group") {
        auto g = group_intervals(series_from({1, 2, 3}, {1, 1, 2}), 0.0);
        REQUIRE(g.size() == 2);
        CHECK(g[0].n_members() == 2);
        CHECK(g[0].weight == doctest::Approx(2.0 / 3));
        CHECK(g[1].n_members() == 1);
    }
    SUBCASE("relative tolerance merges near-equal intervals") {
        auto g = group_intervals(series_from({1, 2}, {1.0, 1.0005}), 1e-3);
        REQUIRE(g.size() == 1);
        CHECK(g[0].representative_dt == doctest::Approx(1.00025).epsilon(1e-12));
    }
    SUBCASE("sizes sum to n, weights to 1") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(0.1, 1.0);
        std::vector<double> dt, dv;
        for (int i = 0; i < 200; ++i) {
            dt.push_back(u(rng) < 0.4 ? 0.25 : u(rng));
            dv.push_back(u(rng));
        }
        auto g = group_intervals(series_from(dv, dt), 0.01);
        std::size_t total = 0;
        double weight = 0.0;
        for (const auto& grp : g) {
            total += grp.n_members();
            weight += grp.weight;
        }
        CHECK(total == 200);
        CHECK(weight == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("estimate_beta_eff") {
    SUBCASE("deterministic slope is recovered exactly") {
        auto track = track_linear(2.0, 20, 0.25, "lin");
        auto [ix, iy] = extract_increments(track);
        CHECK(estimate_beta_eff(ix, group_intervals(ix, 0.0)) == 2.0);
        CHECK(estimate_beta_eff(iy, group_intervals(iy, 0.0)) == -2.0);
    }
    SUBCASE("all-zero steps give zero") {
        auto incs = series_from({0, 0, 0}, {0.3, 0.9, 0.4});
        CHECK(estimate_beta_eff(incs, group_intervals(incs, 0.0)) == 0.0);
    }
    SUBCASE("singleton groups reproduce the endpoint slope") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(0.1, 2.0);
        std::normal_distribution<double> z(0.0, 1.0);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> dv, dt;
            for (int i = 0; i < 300; ++i) {
                dt.push_back(u(rng));
                dv.push_back(z(rng));
            }
            auto incs = series_from(dv, dt);
            const double beta = estimate_beta_eff(incs, group_intervals(incs, 0.0));
            CHECK(beta == incs.total_dv() / incs.total_dt());
        }
    }
    SUBCASE("monte carlo unbiasedness") {
        std::vector<double> beta_hats;
        for (int p = 0; p < 400; ++p) {
            auto track = simulate_free_path("p", {0.5, 0.0}, DiffusionLaw::constant(1.0),
                                            IntervalDistribution::exponential(0.2), 201,
                                            0.0, 0.0, derive_seed(21, p));
            auto [ix, iy] = extract_increments(track);
            beta_hats.push_back(estimate_beta_eff(ix, group_intervals(ix, 0.0)));
        }
        CHECK(std::abs(sample_mean(beta_hats) - 0.5) <
              3.0 * sample_sd(beta_hats) / std::sqrt(400.0));
    }
}

TEST_CASE("estimate_d_eff") {
    SUBCASE("deterministic path centers to zero") {
        auto track = track_linear(1.5, 16, 0.25, "lin");
        auto [ix, iy] = extract_increments(track);
        const double beta = estimate_beta_eff(ix, group_intervals(ix, 0.0));
        CHECK(estimate_d_eff(ix, beta, true) == 0.0);
        CHECK(estimate_d_eff(ix, beta, false) == 0.0);
    }
    SUBCASE("needs two increments") {
        CHECK_THROWS_AS(estimate_d_eff(series_from({1.0}, {1.0}), 0.0, true),
                        argument_error);
    }
    SUBCASE("monte carlo: unbiased, and the error term is sigma0^2/dT") {
        // dyadic dt so the accumulated track times reproduce one exact group
        std::vector<double> d_clean, d_noisy;
        const double sigma0_sq = 0.5, delta_t = 500 * 0.25;
        for (int p = 0; p < 400; ++p) {
            auto track = simulate_free_path("p", {0.0, 0.0}, DiffusionLaw::constant(1.0),
                                            IntervalDistribution::fixed({0.25}, {1.0}), 501,
                                            0.0, 0.0, derive_seed(77, 2 * p));
            auto noisy = add_noise(track, NoiseModel::gaussian(std::sqrt(sigma0_sq)),
                                   derive_seed(77, 2 * p + 1));
            auto [ix, iy] = extract_increments(track);
            auto [nx, ny] = extract_increments(noisy);
            d_clean.push_back(estimate_d_eff(ix, estimate_beta_eff(ix, group_intervals(ix, 0.0)), true));
            d_noisy.push_back(estimate_d_eff(nx, estimate_beta_eff(nx, group_intervals(nx, 0.0)), true));
        }
        const double se_clean = sample_sd(d_clean) / 20.0;
        const double se_noisy = sample_sd(d_noisy) / 20.0;
        CHECK(std::abs(sample_mean(d_clean) - 1.0) < 3.0 * se_clean);
        CHECK(std::abs(sample_mean(d_noisy) - (1.0 + sigma0_sq / delta_t)) <
              3.0 * se_noisy);
    }
}

TEST_CASE("correct_for_error") {
    CHECK(correct_for_error(1.005, 0.5, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(correct_for_error(0.7, 0.0, 10.0) == 0.7);
    CHECK_THROWS_AS(correct_for_error(1.0, 0.5, 0.0), argument_error);
}

TEST_CASE("estimate_collective") {
    EffectiveParams a;
    a.path_id = "a";
    a.x = {1.0, 0.5, false};
    a.y = {0.0, 0.5, false};
    a.delta_t = 1.0;
    a.n = 10;
    EffectiveParams b = a;
    b.path_id = "b";
    b.x.beta_eff = 3.0;
    b.delta_t = 3.0;

    SUBCASE("single path collapses to the effective values") {
        const auto c = estimate_collective({a});
        CHECK(c.beta_x == a.x.beta_eff);
        CHECK(c.d_x == a.x.d_eff);
        CHECK(c.path_count == 1);
    }
    SUBCASE("duration-weighted mean") {
        const auto c = estimate_collective({a, b});
        CHECK(c.beta_x == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(c.total_duration == 4.0);
    }
    SUBCASE("empty ensemble rejected") {
        CHECK_THROWS_AS(estimate_collective({}), argument_error);
    }
}

TEST_CASE("bootstrap_effective") {
    SUBCASE("constant increments in every group give zero-width intervals") {
        auto incs = series_from({0.5, 0.5, 0.5, 0.7, 0.7, 0.7}, {1, 1, 1, 2, 2, 2});
        const auto r = bootstrap_effective(incs, 200, 0.9, 5, 0.0);
        CHECK(r.beta_ci.lower == r.beta_ci.upper);
        CHECK(r.d_ci.lower == r.d_ci.upper);
    }
    SUBCASE("same seed reproduces the interval") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<double> dv, dt;
        for (int i = 0; i < 100; ++i) {
            dv.push_back(z(rng));
            dt.push_back(0.25);
        }
        auto incs = series_from(dv, dt);
        const auto r1 = bootstrap_effective(incs, 300, 0.9, 99, 0.0);
        const auto r2 = bootstrap_effective(incs, 300, 0.9, 99, 0.0);
        const auto r3 = bootstrap_effective(incs, 300, 0.9, 100, 0.0);
        CHECK(r1.beta_ci.lower == r2.beta_ci.lower);
        CHECK(r1.d_ci.upper == r2.d_ci.upper);
        CHECK(r1.beta_ci.lower != r3.beta_ci.lower);
    }
    SUBCASE("replicate floor") {
        auto incs = series_from({1, 2}, {1, 1});
        CHECK_THROWS_AS(bootstrap_effective(incs, 99, 0.9, 1, 0.0), argument_error);
        CHECK_THROWS_AS(bootstrap_effective(incs, 200, 1.2, 1, 0.0), argument_error);
    }
}

TEST_CASE("bootstrap_collective") {
    SUBCASE("identical constant paths give zero-width intervals") {
        std::vector<TrackSeries> tracks = {track_linear(0.5, 16, 0.25, "a"),
                                           track_linear(0.5, 16, 0.25, "b")};
        const auto r = bootstrap_collective(tracks, 150, 0.9, 7, 0.0);
        CHECK(r.beta_x_ci.lower == r.beta_x_ci.upper);
        CHECK(r.d_x_ci.lower == r.d_x_ci.upper);
    }
    SUBCASE("single path is redirected") {
        std::vector<TrackSeries> one = {track_linear(0.5, 16, 0.25, "a")};
        CHECK_THROWS_WITH_AS(bootstrap_collective(one, 150, 0.9, 7, 0.0),
                             doctest::Contains("bootstrap_effective"), argument_error);
    }
    SUBCASE("determinism and width shrink with ensemble size") {
        auto make_ensemble = [&](std::size_t n_paths, std::uint64_t seed) {
            std::vector<TrackSeries> tracks;
            for (std::size_t p = 0; p < n_paths; ++p)
                tracks.push_back(simulate_free_path(
                    "p" + std::to_string(p), {0.3, -0.1}, DiffusionLaw::constant(1.0),
                    IntervalDistribution::exponential(0.25), 51, 0.0, 0.0,
                    derive_seed(seed, p)));
            return tracks;
        };
        const auto e5 = make_ensemble(5, 1);
        const auto r5a = bootstrap_collective(e5, 150, 0.9, 11, 0.0);
        const auto r5b = bootstrap_collective(e5, 150, 0.9, 11, 0.0);
        CHECK(r5a.beta_x_ci.lower == r5b.beta_x_ci.lower);
        CHECK(r5a.d_y_ci.upper == r5b.d_y_ci.upper);

        const auto r20 = bootstrap_collective(make_ensemble(20, 2), 150, 0.9, 11, 0.0);
        const auto r80 = bootstrap_collective(make_ensemble(80, 3), 150, 0.9, 11, 0.0);
        const double w5 = r5a.beta_x_ci.upper - r5a.beta_x_ci.lower;
        const double w20 = r20.beta_x_ci.upper - r20.beta_x_ci.lower;
        const double w80 = r80.beta_x_ci.upper - r80.beta_x_ci.lower;
        CHECK(w20 < w5);
        CHECK(w80 < w20);
    }
}

TEST_CASE("compare_models") {
    SUBCASE("identical paths have z = 0 and a diagonal qq") {
        // dyadic dt so the duration-weighted collective mean is bit-exact
        std::mt19937_64 rng(17);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<TrackObservation> obs;
        double x = 0.0;
        for (int i = 0; i <= 16; ++i) {
            obs.push_back({"a", 0.25 * i, x, -x});
            x += 0.1 * z(rng);
        }
        std::vector<TrackObservation> obs_b = obs;
        for (auto& o : obs_b) o.path_id = "b";
        std::vector<TrackSeries> tracks;
        tracks.emplace_back("a", obs);
        tracks.emplace_back("b", obs_b);

        std::vector<EffectiveParams> effs = {estimate_effective(tracks[0]),
                                             estimate_effective(tracks[1])};
        auto [ix_a, iy_a] = extract_increments(tracks[0]);
        auto [ix_b, iy_b] = extract_increments(tracks[1]);
        std::vector<PathBootstrap> boots = {
            {bootstrap_effective(ix_a, 150, 0.9, 1), bootstrap_effective(iy_a, 150, 0.9, 2)},
            {bootstrap_effective(ix_b, 150, 0.9, 1), bootstrap_effective(iy_b, 150, 0.9, 2)}};
        const auto collective = estimate_collective(effs);
        const auto cmp = compare_models(tracks, effs, boots, collective, 0);
        for (const auto& row : cmp.rows) {
            CHECK(row.z == 0.0);
            CHECK(row.p_value == 1.0);
        }
        for (const auto& q : cmp.qq_x) CHECK(q.q_effective == q.q_collective);
        for (const auto& q : cmp.qq_y) CHECK(q.q_effective == q.q_collective);
    }
    SUBCASE("needs replicates and at least two paths") {
        std::vector<TrackSeries> tracks = {track_linear(0.2, 16, 0.25, "a")};
        std::vector<EffectiveParams> effs = {estimate_effective(tracks[0])};
        CHECK_THROWS_AS(compare_models(tracks, effs, {PathBootstrap{}},
                                       estimate_collective(effs), 0),
                        argument_error);
    }
    SUBCASE("common-law ensembles reject near the nominal rate") {
        // dyadic interval menu: repeated dt values make the group-preserving
        // bootstrap informative
        const auto menu =
            IntervalDistribution::fixed({0.125, 0.25, 0.5}, {0.25, 0.5, 0.25});
        std::size_t n_z = 0, n_reject = 0;
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<TrackSeries> tracks;
            for (int p = 0; p < 8; ++p)
                tracks.push_back(simulate_free_path(
                    "p" + std::to_string(p), {0.4, 0.0}, DiffusionLaw::constant(1.0),
                    menu, 101, 0.0, 0.0, derive_seed(1000 + trial, p)));
            std::vector<EffectiveParams> effs;
            std::vector<PathBootstrap> boots;
            for (std::size_t p = 0; p < tracks.size(); ++p) {
                effs.push_back(estimate_effective(tracks[p]));
                auto [ix, iy] = extract_increments(tracks[p]);
                boots.push_back(
                    {bootstrap_effective(ix, 200, 0.9, derive_seed(5000 + trial, 2 * p)),
                     bootstrap_effective(iy, 200, 0.9, derive_seed(5000 + trial, 2 * p + 1))});
            }
            const auto cmp =
                compare_models(tracks, effs, boots, estimate_collective(effs), 0);
            for (const auto& row : cmp.rows) {
                if (row.param != "beta") continue;
                ++n_z;
                if (std::abs(row.z) > 1.96) ++n_reject;
            }
        }
        const double frac = static_cast<double>(n_reject) / static_cast<double>(n_z);
        CHECK(frac > 0.02);
        CHECK(frac < 0.08);
    }
}

TEST_CASE("percentile_interval conventions") {
    std::vector<double> reps;
    for (int i = 1; i <= 99; ++i) reps.push_back(static_cast<double>(i));
    const auto ci = percentile_interval(reps, 0.90, 0);
    CHECK(ci.lower == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(ci.upper == doctest::Approx(95.0).epsilon(1e-12));
    CHECK(ci.contains(50.0));
    CHECK(!ci.contains(96.0));
}
