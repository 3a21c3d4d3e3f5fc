#include "migprop/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "migprop/math_util.hpp"

namespace migprop {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

TrackSeries::TrackSeries(std::string path_id, std::vector<TrackObservation> observations)
    : path_id_(std::move(path_id)), observations_(std::move(observations)) {
    if (observations_.size() < 2)
        throw argument_error("track '" + path_id_ + "' needs at least 2 observations");
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const auto& o = observations_[i];
        if (!finite(o.t) || !finite(o.x) || !finite(o.y))
            throw data_error("track '" + path_id_ + "': non-finite value at index " +
                             std::to_string(i));
        if (o.path_id != path_id_)
            throw data_error("track '" + path_id_ + "': mixed path_id at index " +
                             std::to_string(i));
        if (i > 0 && !(o.t > observations_[i - 1].t))
            throw data_error("track '" + path_id_ + "': non-increasing time at index " +
                             std::to_string(i));
    }
}

IncrementSeries::IncrementSeries(Axis axis, std::vector<Increment> deltas)
    : axis_(axis), deltas_(std::move(deltas)) {
    for (std::size_t i = 0; i < deltas_.size(); ++i) {
        if (!(deltas_[i].dt > 0.0))
            throw data_error(std::string("increment series (") + axis_name(axis_) +
                             "): non-positive dt at index " + std::to_string(i));
        if (!finite(deltas_[i].dv))
            throw data_error(std::string("increment series (") + axis_name(axis_) +
                             "): non-finite step at index " + std::to_string(i));
    }
}

double IncrementSeries::total_dt() const {
    neumaier_sum s;
    for (const auto& d : deltas_) s.add(d.dt);
    return s.value();
}

double IncrementSeries::total_dv() const {
    neumaier_sum s;
    for (const auto& d : deltas_) s.add(d.dv);
    return s.value();
}

ErrorCumulants::ErrorCumulants(double variance_, double k3_, double k4_)
    : variance(variance_), k3(k3_), k4(k4_) {
    if (!(variance >= 0.0)) throw argument_error("error variance must be >= 0");
    if (!finite(k3) || !finite(k4)) throw argument_error("error cumulants must be finite");
}

DiffusionLaw DiffusionLaw::constant(double d) {
    if (!(d >= 0.0) || !finite(d)) throw argument_error("diffusion coefficient must be >= 0");
    return DiffusionLaw({}, {d});
}

DiffusionLaw DiffusionLaw::piecewise(std::vector<double> breakpoints,
                                     std::vector<double> values) {
    if (breakpoints.empty() || breakpoints.size() != values.size())
        throw argument_error("piecewise diffusion needs matching breakpoints and values");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!finite(breakpoints[i])) throw argument_error("non-finite breakpoint");
        if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
            throw argument_error("breakpoints must be strictly increasing");
        if (!(values[i] > 0.0)) throw argument_error("diffusion values must be > 0");
    }
    return DiffusionLaw(std::move(breakpoints), std::move(values));
}

DiffusionLaw::DiffusionLaw(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {}

double DiffusionLaw::value_at(double t) const {
    if (is_constant()) return values_.front();
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it == breakpoints_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double DiffusionLaw::integrate(double t0, double t1) const {
    if (t1 < t0) throw argument_error("integrate_diffusion: t1 < t0");
    if (t1 == t0) return 0.0;
    if (is_constant()) return values_.front() * (t1 - t0);
    neumaier_sum acc;
    double cur = t0;
    while (cur < t1) {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), cur);
        const double next =
            it == breakpoints_.end() ? t1 : std::min(t1, *it);
        acc.add(value_at(cur) * (next - cur));
        cur = next;
    }
    return acc.value();
}

std::pair<IncrementSeries, IncrementSeries> extract_increments(const TrackSeries& track) {
    const auto& obs = track.observations();
    std::vector<Increment> dx, dy;
    dx.reserve(obs.size() - 1);
    dy.reserve(obs.size() - 1);
    for (std::size_t i = 1; i < obs.size(); ++i) {
        const double dt = obs[i].t - obs[i - 1].t;
        if (!(dt > 0.0))
            throw data_error("non-increasing time at index " + std::to_string(i));
        dx.push_back({obs[i].x - obs[i - 1].x, dt});
        dy.push_back({obs[i].y - obs[i - 1].y, dt});
    }
    return {IncrementSeries(Axis::x, std::move(dx)), IncrementSeries(Axis::y, std::move(dy))};
}

PathSummary summarize_path(const TrackSeries& track) {
    auto [ix, iy] = extract_increments(track);
    PathSummary s;
    s.delta_t = ix.total_dt();
    s.delta_x = ix.total_dv();
    s.delta_y = iy.total_dv();
    s.n = ix.n();
    return s;
}

double integrate_diffusion(const DiffusionLaw& law, double t0, double t1) {
    return law.integrate(t0, t1);
}

namespace {

// Interval boundaries [t_{i-1}, t_i] with t_0 = 0 for the dt sequence.
std::pair<double, double> interval_bounds(std::size_t i, const std::vector<double>& dt_seq) {
    neumaier_sum acc;
    double lo = 0.0;
    for (std::size_t k = 0; k < i; ++k) {
        lo = acc.value();
        acc.add(dt_seq[k]);
    }
    return {lo, acc.value()};
}

double error_cumulant(int a, const ErrorCumulants& err) {
    switch (a) {
        case 2: return err.variance;
        case 3: return err.k3;
        case 4: return err.k4;
        default:
            throw argument_error("error cumulants tracked up to order 4 (got order " +
                                 std::to_string(a) + ")");
    }
}

}  // namespace

double obs_increment_cov(std::size_t i, std::size_t j, const DiffusionLaw& law,
                         const ErrorCumulants& err, const std::vector<double>& dt_seq) {
    const std::size_t n = dt_seq.size();
    if (i < 1 || i > n || j < 1 || j > n)
        throw argument_error("obs_increment_cov: index out of range");
    if (i == j) {
        auto [lo, hi] = interval_bounds(i, dt_seq);
        return 2.0 * law.integrate(lo, hi) + 2.0 * err.variance;
    }
    const std::size_t gap = i > j ? i - j : j - i;
    if (gap == 1) return -err.variance;
    return 0.0;
}

double joint_cumulant_obs(int a, std::size_t i, std::size_t j, int a_i,
                          const ErrorCumulants& err) {
    if (a < 3)
        throw argument_error("joint_cumulant_obs: order must be >= 3 "
                             "(second order is obs_increment_cov)");
    if (a_i < 0 || a_i > a) throw argument_error("joint_cumulant_obs: a_i out of [0, a]");
    const double ka = error_cumulant(a, err);
    if (i == j) return (a % 2 == 0 ? 2.0 : 0.0) * ka;
    const int sign_i = (a_i % 2 == 0) ? 1 : -1;
    const int a_j = a - a_i;
    const int sign_j = (a_j % 2 == 0) ? 1 : -1;
    if (j + 1 == i) return sign_i * ka;
    if (j == i + 1) return sign_j * ka;
    return 0.0;
}

DeltaXCumulants deltaX_cumulants(std::size_t n, const DiffusionLaw& law,
                                 const std::vector<double>& dt_seq, double beta,
                                 const ErrorCumulants& err) {
    if (n < 1 || dt_seq.size() != n)
        throw argument_error("deltaX_cumulants: need n >= 1 matching dt sequence");
    neumaier_sum total_dt, total_var;
    double t = 0.0;
    for (double dt : dt_seq) {
        total_dt.add(dt);
        total_var.add(2.0 * law.integrate(t, t + dt));
        t += dt;
    }
    DeltaXCumulants c;
    c.k1 = beta * total_dt.value();
    c.k2 = total_var.value() + 2.0 * err.variance;
    c.k3 = 0.0;
    c.k4 = 2.0 * err.k4;
    return c;
}

std::vector<double> standardize_increments(const IncrementSeries& incs, double beta,
                                           double d_eff, bool include_error,
                                           double sigma0_sq) {
    if (!(d_eff > 0.0))
        throw numeric_error("standardize_increments: diffusion parameter must be positive");
    if (include_error && !(sigma0_sq >= 0.0))
        throw argument_error("standardize_increments: sigma0^2 must be >= 0");
    std::vector<double> u;
    u.reserve(incs.n());
    const double err_term = include_error ? 2.0 * sigma0_sq : 0.0;
    for (const auto& d : incs.deltas()) {
        const double scale = std::sqrt(2.0 * d_eff * d.dt + err_term);
        u.push_back((d.dv - beta * d.dt) / scale);
    }
    return u;
}

}  // namespace migprop
