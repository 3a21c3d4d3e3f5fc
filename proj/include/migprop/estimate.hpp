#pragma once

// Effective and collective drift/diffusion estimators for irregularly
// sampled noisy tracks, plus percentile-bootstrap confidence intervals and
// the effective-vs-collective model comparison.
//
// The effective estimators work on interval groups (increments sharing the
// same dt up to a relative tolerance). With the default tolerance 0 every
// increment is its own group, and
//   beta_hat = sum(dx) / sum(dt)         (the endpoint slope)
//   d_hat    = [sum c_i^2 + 2 sum c_i c_{i+1}] / (2 sum dt),
//              c_i = dx_i - beta_hat dt_i
// The banded form keeps only the covariance band that has nonzero
// expectation; the full double sum collapses to (sum c_i)^2 / (2 dT) and is
// retained as an alternative mode.
//
// E[d_hat] = D + sigma0^2/dT; correct_for_error removes the known-noise term.

#include <cstdint>
#include <string>
#include <vector>

#include "migprop/model.hpp"

namespace migprop {

struct IntervalGroup {
    double representative_dt = 0.0;          // mean dt of the members
    std::vector<std::size_t> member_index;   // positions in the increment sequence
    std::vector<double> member_dv;
    std::vector<double> member_dt;
    double weight = 0.0;                     // n_i / n

    std::size_t n_members() const { return member_index.size(); }
};

// Groups increments by dt: two intervals share a group iff
// |dt_a - dt_b| <= rel_tol * max(dt_a, dt_b), anchored at the smallest
// member; groups come out ordered by dt.
std::vector<IntervalGroup> group_intervals(const IncrementSeries& incs, double rel_tol);

double estimate_beta_eff(const IncrementSeries& incs, const std::vector<IntervalGroup>& groups);

double estimate_d_eff(const IncrementSeries& incs, double beta_hat, bool banded = true);

// Removes the measurement-error inflation from an effective diffusion
// estimate: d_true = d_eff - sigma0^2 / delta_t.
double correct_for_error(double d_eff, double sigma0_sq, double delta_t);

struct AxisEstimate {
    double beta_eff = 0.0;
    double d_eff = 0.0;
    bool d_nonpositive = false;  // small-sample warning; value kept as-is
};

struct EffectiveParams {
    std::string path_id;
    AxisEstimate x;
    AxisEstimate y;
    double delta_t = 0.0;
    std::size_t n = 0;
};

EffectiveParams estimate_effective(const TrackSeries& track, double rel_tol = 0.0);

struct CollectiveParams {
    double beta_x = 0.0;
    double beta_y = 0.0;
    double d_x = 0.0;
    double d_y = 0.0;
    double total_duration = 0.0;
    std::size_t path_count = 0;
};

// Duration-weighted ensemble means, the sample analog of the collective
// definition: beta_collect * sum(dT) = sum(beta_eff dT).
CollectiveParams estimate_collective(const std::vector<EffectiveParams>& paths);

struct BootstrapCI {
    double level = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;

    bool contains(double v) const { return lower <= v && v <= upper; }
};

struct BootstrapResult {
    BootstrapCI beta_ci;
    BootstrapCI d_ci;
    std::vector<double> beta_reps;
    std::vector<double> d_reps;
};

// Percentile interval of a replicate set at the given level.
BootstrapCI percentile_interval(std::vector<double> replicates, double level,
                                std::uint64_t seed);

// Percentile bootstrap for one axis of one path: each replicate redraws
// every increment from its interval group (group sizes preserved),
// re-estimates, and the CI is the percentile interval of the replicates.
// Replicate r uses an RNG stream derived from (seed, r).
BootstrapResult bootstrap_effective(const IncrementSeries& incs, std::size_t n_replicates,
                                    double level, std::uint64_t seed, double rel_tol = 0.0);

struct CollectiveBootstrap {
    BootstrapCI beta_x_ci, beta_y_ci, d_x_ci, d_y_ci;
    std::vector<double> beta_x_reps, beta_y_reps, d_x_reps, d_y_reps;
};

// Two-stage bootstrap for the collective parameters: each replicate
// resamples paths with replacement, then increments within every chosen
// path (jointly across axes, preserving the shared dt structure).
CollectiveBootstrap bootstrap_collective(const std::vector<TrackSeries>& tracks,
                                         std::size_t n_replicates, double level,
                                         std::uint64_t seed, double rel_tol = 0.0);

struct PathBootstrap {
    BootstrapResult x;
    BootstrapResult y;
};

struct ComparisonRow {
    std::string path_id;
    Axis axis = Axis::x;
    std::string param;  // "beta" or "d"
    double effective = 0.0;
    double collective = 0.0;
    double se_boot = 0.0;
    double z = 0.0;
    double p_value = 1.0;
};

struct QQPair {
    double prob = 0.0;
    double q_effective = 0.0;
    double q_collective = 0.0;
};

struct ModelComparison {
    std::vector<ComparisonRow> rows;
    std::vector<QQPair> qq_x;
    std::vector<QQPair> qq_y;
};

// Matched quantiles of pooled standardized increments under per-path
// effective vs collective parameters, one set per axis. qq_points = 0 pairs
// every order statistic. Axes with unusable (non-positive) diffusion are
// skipped.
std::pair<std::vector<QQPair>, std::vector<QQPair>> qq_effective_vs_collective(
    const std::vector<TrackSeries>& tracks, const std::vector<EffectiveParams>& effective,
    const CollectiveParams& collective, std::size_t qq_points = 0);

// Per-path z-scores of effective-vs-collective parameters (bootstrap SE in
// the denominator, two-sided normal p), plus matched quantiles of the pooled
// standardized increments under the two parameterizations. qq_points = 0
// pairs every order statistic.
ModelComparison compare_models(const std::vector<TrackSeries>& tracks,
                               const std::vector<EffectiveParams>& effective,
                               const std::vector<PathBootstrap>& boots,
                               const CollectiveParams& collective,
                               std::size_t qq_points = 0);

}  // namespace migprop
