#include "migprop/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "migprop/math_util.hpp"

namespace migprop {

std::vector<IntervalGroup> group_intervals(const IncrementSeries& incs, double rel_tol) {
    if (!(rel_tol >= 0.0)) throw argument_error("group_intervals: rel_tol must be >= 0");
    const auto& deltas = incs.deltas();
    if (deltas.empty()) throw argument_error("group_intervals: empty increment series");

    std::vector<std::size_t> order(deltas.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (deltas[a].dt != deltas[b].dt) return deltas[a].dt < deltas[b].dt;
        return a < b;
    });

    std::vector<IntervalGroup> groups;
    double anchor = 0.0;
    for (std::size_t idx : order) {
        const double dt = deltas[idx].dt;
        const bool fresh =
            groups.empty() || std::abs(dt - anchor) > rel_tol * std::max(dt, anchor);
        if (fresh) {
            groups.emplace_back();
            anchor = dt;
        }
        auto& g = groups.back();
        g.member_index.push_back(idx);
        g.member_dv.push_back(deltas[idx].dv);
        g.member_dt.push_back(dt);
    }
    const double n = static_cast<double>(deltas.size());
    for (auto& g : groups) {
        g.representative_dt = sample_mean(g.member_dt);
        g.weight = static_cast<double>(g.n_members()) / n;
    }
    return groups;
}

double estimate_beta_eff(const IncrementSeries& incs,
                         const std::vector<IntervalGroup>& groups) {
    if (incs.n() == 0 || groups.empty())
        throw argument_error("estimate_beta_eff: empty increment series");
    neumaier_sum num, den;
    for (const auto& g : groups) {
        num.add(sample_mean(g.member_dv));
        den.add(g.representative_dt);
    }
    return num.value() / den.value();
}

double estimate_d_eff(const IncrementSeries& incs, double beta_hat, bool banded) {
    const auto& deltas = incs.deltas();
    if (deltas.size() < 2) throw argument_error("estimate_d_eff: need at least 2 increments");
    std::vector<double> centered(deltas.size());
    neumaier_sum total_dt;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        centered[i] = deltas[i].dv - beta_hat * deltas[i].dt;
        total_dt.add(deltas[i].dt);
    }
    neumaier_sum quad;
    if (banded) {
        for (std::size_t i = 0; i < centered.size(); ++i) {
            quad.add(centered[i] * centered[i]);
            if (i + 1 < centered.size()) quad.add(2.0 * centered[i] * centered[i + 1]);
        }
    } else {
        neumaier_sum c;
        for (double v : centered) c.add(v);
        quad.add(c.value() * c.value());
    }
    return quad.value() / (2.0 * total_dt.value());
}

double correct_for_error(double d_eff, double sigma0_sq, double delta_t) {
    if (!(delta_t > 0.0)) throw argument_error("correct_for_error: delta_t must be > 0");
    if (!(sigma0_sq >= 0.0)) throw argument_error("correct_for_error: sigma0^2 must be >= 0");
    return d_eff - sigma0_sq / delta_t;
}

namespace {

AxisEstimate estimate_axis(const IncrementSeries& incs, double rel_tol) {
    AxisEstimate est;
    const auto groups = group_intervals(incs, rel_tol);
    est.beta_eff = estimate_beta_eff(incs, groups);
    est.d_eff = estimate_d_eff(incs, est.beta_eff, true);
    est.d_nonpositive = !(est.d_eff > 0.0);
    return est;
}

}  // namespace

EffectiveParams estimate_effective(const TrackSeries& track, double rel_tol) {
    auto [ix, iy] = extract_increments(track);
    EffectiveParams p;
    p.path_id = track.path_id();
    p.x = estimate_axis(ix, rel_tol);
    p.y = estimate_axis(iy, rel_tol);
    p.delta_t = ix.total_dt();
    p.n = ix.n();
    return p;
}

CollectiveParams estimate_collective(const std::vector<EffectiveParams>& paths) {
    if (paths.empty()) throw argument_error("estimate_collective: empty ensemble");
    neumaier_sum dur, bx, by, dx, dy;
    for (const auto& p : paths) {
        if (!(p.delta_t > 0.0))
            throw argument_error("estimate_collective: path '" + p.path_id +
                                 "' has non-positive duration");
        dur.add(p.delta_t);
        bx.add(p.x.beta_eff * p.delta_t);
        by.add(p.y.beta_eff * p.delta_t);
        dx.add(p.x.d_eff * p.delta_t);
        dy.add(p.y.d_eff * p.delta_t);
    }
    CollectiveParams c;
    c.total_duration = dur.value();
    c.path_count = paths.size();
    c.beta_x = bx.value() / c.total_duration;
    c.beta_y = by.value() / c.total_duration;
    c.d_x = dx.value() / c.total_duration;
    c.d_y = dy.value() / c.total_duration;
    return c;
}

BootstrapCI percentile_interval(std::vector<double> replicates, double level,
                                std::uint64_t seed) {
    if (replicates.empty()) throw argument_error("percentile_interval: empty replicate set");
    if (!(level > 0.0) || !(level < 1.0))
        throw argument_error("percentile_interval: level must be in (0, 1)");
    std::sort(replicates.begin(), replicates.end());
    const double alpha = 1.0 - level;
    BootstrapCI ci;
    ci.level = level;
    ci.lower = quantile_type6(replicates, alpha / 2.0);
    ci.upper = quantile_type6(replicates, 1.0 - alpha / 2.0);
    ci.replicates = replicates.size();
    ci.seed = seed;
    return ci;
}

namespace {

BootstrapCI percentile_ci(std::vector<double> reps, double level, std::uint64_t seed) {
    return percentile_interval(std::move(reps), level, seed);
}

void check_bootstrap_args(std::size_t n_replicates, double level) {
    if (n_replicates < 100)
        throw argument_error("bootstrap: need at least 100 replicates");
    if (!(level > 0.0) || !(level < 1.0))
        throw argument_error("bootstrap: level must be in (0, 1)");
}

// position -> (group, slot count) lookup for group-preserving resampling
struct GroupLookup {
    std::vector<const IntervalGroup*> by_position;

    explicit GroupLookup(const std::vector<IntervalGroup>& groups, std::size_t n)
        : by_position(n, nullptr) {
        for (const auto& g : groups)
            for (std::size_t idx : g.member_index) by_position[idx] = &g;
    }
};

}  // namespace

BootstrapResult bootstrap_effective(const IncrementSeries& incs, std::size_t n_replicates,
                                    double level, std::uint64_t seed, double rel_tol) {
    check_bootstrap_args(n_replicates, level);
    if (incs.n() < 2)
        throw argument_error("bootstrap_effective: need at least 2 increments");
    const auto groups = group_intervals(incs, rel_tol);
    const GroupLookup lookup(groups, incs.n());
    const auto& deltas = incs.deltas();

    BootstrapResult out;
    out.beta_reps.reserve(n_replicates);
    out.d_reps.reserve(n_replicates);
    std::vector<Increment> resampled(deltas.size());

    for (std::size_t r = 0; r < n_replicates; ++r) {
        std::mt19937_64 rng(derive_seed(seed, r));
        for (std::size_t pos = 0; pos < deltas.size(); ++pos) {
            const auto* g = lookup.by_position[pos];
            const std::size_t pick = std::uniform_int_distribution<std::size_t>(
                0, g->n_members() - 1)(rng);
            resampled[pos] = {g->member_dv[pick], deltas[pos].dt};
        }
        IncrementSeries rep(incs.axis(), resampled);
        const auto rep_groups = group_intervals(rep, rel_tol);
        const double beta = estimate_beta_eff(rep, rep_groups);
        out.beta_reps.push_back(beta);
        out.d_reps.push_back(estimate_d_eff(rep, beta, true));
    }
    out.beta_ci = percentile_ci(out.beta_reps, level, seed);
    out.d_ci = percentile_ci(out.d_reps, level, seed);
    return out;
}

namespace {

struct TrackCache {
    IncrementSeries x;
    IncrementSeries y;
    std::vector<IntervalGroup> groups;  // built on dt, shared by both axes
    GroupLookup lookup;
    double delta_t;

    TrackCache(IncrementSeries ix, IncrementSeries iy, double rel_tol)
        : x(std::move(ix)),
          y(std::move(iy)),
          groups(group_intervals(x, rel_tol)),
          lookup(groups, x.n()),
          delta_t(x.total_dt()) {}
};

}  // namespace

CollectiveBootstrap bootstrap_collective(const std::vector<TrackSeries>& tracks,
                                         std::size_t n_replicates, double level,
                                         std::uint64_t seed, double rel_tol) {
    check_bootstrap_args(n_replicates, level);
    if (tracks.size() < 2)
        throw argument_error(
            "bootstrap_collective: need at least 2 paths (use bootstrap_effective for one)");

    std::vector<TrackCache> cache;
    cache.reserve(tracks.size());
    for (const auto& t : tracks) {
        auto [ix, iy] = extract_increments(t);
        cache.emplace_back(std::move(ix), std::move(iy), rel_tol);
    }

    CollectiveBootstrap out;
    out.beta_x_reps.reserve(n_replicates);

    std::vector<Increment> rx, ry;
    for (std::size_t r = 0; r < n_replicates; ++r) {
        std::mt19937_64 rng(derive_seed(seed, r));
        std::uniform_int_distribution<std::size_t> pick_path(0, tracks.size() - 1);
        neumaier_sum dur, bx, by, dx, dy;
        for (std::size_t k = 0; k < tracks.size(); ++k) {
            const auto& tc = cache[pick_path(rng)];
            const auto& deltas_x = tc.x.deltas();
            const auto& deltas_y = tc.y.deltas();
            rx.resize(deltas_x.size());
            ry.resize(deltas_y.size());
            for (std::size_t pos = 0; pos < deltas_x.size(); ++pos) {
                const auto* g = tc.lookup.by_position[pos];
                const std::size_t pick = std::uniform_int_distribution<std::size_t>(
                    0, g->n_members() - 1)(rng);
                const std::size_t src = g->member_index[pick];
                rx[pos] = {deltas_x[src].dv, deltas_x[pos].dt};
                ry[pos] = {deltas_y[src].dv, deltas_y[pos].dt};
            }
            IncrementSeries sx(Axis::x, rx), sy(Axis::y, ry);
            const auto gx = group_intervals(sx, rel_tol);
            const auto gy = group_intervals(sy, rel_tol);
            const double beta_x = estimate_beta_eff(sx, gx);
            const double beta_y = estimate_beta_eff(sy, gy);
            dur.add(tc.delta_t);
            bx.add(beta_x * tc.delta_t);
            by.add(beta_y * tc.delta_t);
            dx.add(estimate_d_eff(sx, beta_x, true) * tc.delta_t);
            dy.add(estimate_d_eff(sy, beta_y, true) * tc.delta_t);
        }
        const double total = dur.value();
        out.beta_x_reps.push_back(bx.value() / total);
        out.beta_y_reps.push_back(by.value() / total);
        out.d_x_reps.push_back(dx.value() / total);
        out.d_y_reps.push_back(dy.value() / total);
    }
    out.beta_x_ci = percentile_ci(out.beta_x_reps, level, seed);
    out.beta_y_ci = percentile_ci(out.beta_y_reps, level, seed);
    out.d_x_ci = percentile_ci(out.d_x_reps, level, seed);
    out.d_y_ci = percentile_ci(out.d_y_reps, level, seed);
    return out;
}

namespace {

ComparisonRow make_row(const std::string& path_id, Axis axis, const char* param,
                       double eff, double coll, const std::vector<double>& reps) {
    ComparisonRow row;
    row.path_id = path_id;
    row.axis = axis;
    row.param = param;
    row.effective = eff;
    row.collective = coll;
    row.se_boot = sample_sd(reps);
    const double diff = eff - coll;
    if (row.se_boot > 0.0)
        row.z = diff / row.se_boot;
    else
        row.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    row.p_value = std::isinf(row.z) ? 0.0 : 2.0 * (1.0 - norm_cdf(std::abs(row.z)));
    return row;
}

std::vector<QQPair> matched_quantiles(std::vector<double> eff, std::vector<double> coll,
                                      std::size_t qq_points) {
    std::vector<QQPair> out;
    if (eff.empty() || coll.empty()) return out;
    std::sort(eff.begin(), eff.end());
    std::sort(coll.begin(), coll.end());
    const std::size_t m = qq_points == 0 ? std::min(eff.size(), coll.size()) : qq_points;
    out.reserve(m);
    for (std::size_t k = 1; k <= m; ++k) {
        QQPair q;
        q.prob = static_cast<double>(k) / static_cast<double>(m + 1);
        q.q_effective = quantile_type6(eff, q.prob);
        q.q_collective = quantile_type6(coll, q.prob);
        out.push_back(q);
    }
    return out;
}

}  // namespace

std::pair<std::vector<QQPair>, std::vector<QQPair>> qq_effective_vs_collective(
    const std::vector<TrackSeries>& tracks, const std::vector<EffectiveParams>& effective,
    const CollectiveParams& collective, std::size_t qq_points) {
    if (effective.size() != tracks.size())
        throw argument_error("qq_effective_vs_collective: estimates missing");
    std::vector<double> pool_eff_x, pool_coll_x, pool_eff_y, pool_coll_y;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const auto& e = effective[i];
        auto [ix, iy] = extract_increments(tracks[i]);
        if (!e.x.d_nonpositive && collective.d_x > 0.0) {
            for (double u : standardize_increments(ix, e.x.beta_eff, e.x.d_eff, false, 0.0))
                pool_eff_x.push_back(u);
            for (double u :
                 standardize_increments(ix, collective.beta_x, collective.d_x, false, 0.0))
                pool_coll_x.push_back(u);
        }
        if (!e.y.d_nonpositive && collective.d_y > 0.0) {
            for (double u : standardize_increments(iy, e.y.beta_eff, e.y.d_eff, false, 0.0))
                pool_eff_y.push_back(u);
            for (double u :
                 standardize_increments(iy, collective.beta_y, collective.d_y, false, 0.0))
                pool_coll_y.push_back(u);
        }
    }
    return {matched_quantiles(std::move(pool_eff_x), std::move(pool_coll_x), qq_points),
            matched_quantiles(std::move(pool_eff_y), std::move(pool_coll_y), qq_points)};
}

ModelComparison compare_models(const std::vector<TrackSeries>& tracks,
                               const std::vector<EffectiveParams>& effective,
                               const std::vector<PathBootstrap>& boots,
                               const CollectiveParams& collective,
                               std::size_t qq_points) {
    if (tracks.size() < 2) throw argument_error("compare_models: need at least 2 paths");
    if (effective.size() != tracks.size() || boots.size() != tracks.size())
        throw argument_error("compare_models: per-path estimates/replicates missing");
    for (const auto& b : boots)
        if (b.x.beta_reps.empty() || b.y.beta_reps.empty())
            throw argument_error("compare_models: empty bootstrap replicate set");

    ModelComparison out;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const auto& e = effective[i];
        out.rows.push_back(make_row(e.path_id, Axis::x, "beta", e.x.beta_eff,
                                    collective.beta_x, boots[i].x.beta_reps));
        out.rows.push_back(make_row(e.path_id, Axis::x, "d", e.x.d_eff, collective.d_x,
                                    boots[i].x.d_reps));
        out.rows.push_back(make_row(e.path_id, Axis::y, "beta", e.y.beta_eff,
                                    collective.beta_y, boots[i].y.beta_reps));
        out.rows.push_back(make_row(e.path_id, Axis::y, "d", e.y.d_eff, collective.d_y,
                                    boots[i].y.d_reps));
    }
    auto [qx, qy] = qq_effective_vs_collective(tracks, effective, collective, qq_points);
    out.qq_x = std::move(qx);
    out.qq_y = std::move(qy);
    return out;
}

}  // namespace migprop
