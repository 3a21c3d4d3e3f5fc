#include "migprop/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "migprop/math_util.hpp"

namespace migprop {

IntervalDistribution IntervalDistribution::fixed(std::vector<double> values,
                                                 std::vector<double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw argument_error("fixed interval distribution needs matching values and weights");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw argument_error("interval values must be > 0");
        if (!(weights[i] > 0.0)) throw argument_error("interval weights must be > 0");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw argument_error("interval weights must sum to 1");
    Fixed f;
    f.values = std::move(values);
    double acc = 0.0;
    for (double w : weights) {
        acc += w / total;
        f.cumulative.push_back(acc);
    }
    f.cumulative.back() = 1.0;
    return IntervalDistribution(Spec{std::move(f)});
}

IntervalDistribution IntervalDistribution::uniform_range(double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo))
        throw argument_error("uniform interval range needs 0 < lo <= hi");
    return IntervalDistribution(Spec{UniformRange{lo, hi}});
}

IntervalDistribution IntervalDistribution::exponential(double mean) {
    if (!(mean > 0.0)) throw argument_error("exponential interval mean must be > 0");
    return IntervalDistribution(Spec{Exponential{mean}});
}

double IntervalDistribution::sample(std::mt19937_64& rng) const {
    return std::visit(
        [&](const auto& spec) -> double {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, Fixed>) {
                const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                auto it =
                    std::lower_bound(spec.cumulative.begin(), spec.cumulative.end(), u);
                const auto idx = static_cast<std::size_t>(it - spec.cumulative.begin());
                return spec.values[std::min(idx, spec.values.size() - 1)];
            } else if constexpr (std::is_same_v<T, UniformRange>) {
                return std::uniform_real_distribution<double>(spec.lo, spec.hi)(rng);
            } else {
                return std::exponential_distribution<double>(1.0 / spec.mean)(rng);
            }
        },
        spec_);
}

NoiseModel NoiseModel::none() { return NoiseModel(Kind::none, 0.0); }

NoiseModel NoiseModel::gaussian(double sigma0) {
    if (!(sigma0 >= 0.0)) throw argument_error("gaussian noise sigma must be >= 0");
    return sigma0 == 0.0 ? none() : NoiseModel(Kind::gaussian, sigma0);
}

NoiseModel NoiseModel::uniform(double half_width) {
    if (!(half_width >= 0.0)) throw argument_error("uniform noise half-width must be >= 0");
    return half_width == 0.0 ? none() : NoiseModel(Kind::uniform, half_width);
}

NoiseModel NoiseModel::laplace(double scale) {
    if (!(scale >= 0.0)) throw argument_error("laplace noise scale must be >= 0");
    return scale == 0.0 ? none() : NoiseModel(Kind::laplace, scale);
}

bool NoiseModel::is_none() const { return kind_ == Kind::none; }

ErrorCumulants NoiseModel::cumulants() const {
    const double p = param_;
    switch (kind_) {
        case Kind::none: return ErrorCumulants(0.0, 0.0, 0.0);
        case Kind::gaussian: return ErrorCumulants(p * p, 0.0, 0.0);
        case Kind::uniform:
            return ErrorCumulants(p * p / 3.0, 0.0, -2.0 * p * p * p * p / 15.0);
        case Kind::laplace:
            return ErrorCumulants(2.0 * p * p, 0.0, 12.0 * p * p * p * p);
    }
    throw argument_error("unreachable noise kind");
}

double NoiseModel::sample(std::mt19937_64& rng) const {
    switch (kind_) {
        case Kind::none: return 0.0;
        case Kind::gaussian:
            return param_ * std::normal_distribution<double>(0.0, 1.0)(rng);
        case Kind::uniform:
            return std::uniform_real_distribution<double>(-param_, param_)(rng);
        case Kind::laplace: {
            // inverse CDF: sign(u) * b * log(1 - 2|u|) with u uniform(-1/2, 1/2)
            const double u = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
            return u < 0.0 ? param_ * std::log1p(2.0 * u) : -param_ * std::log1p(-2.0 * u);
        }
    }
    throw argument_error("unreachable noise kind");
}

TrackSeries simulate_free_path(const std::string& path_id, const DriftVector& drift,
                               const DiffusionLaw& law, const IntervalDistribution& intervals,
                               std::size_t n_obs, double x0, double y0, std::uint64_t seed) {
    if (n_obs < 2) throw argument_error("simulate_free_path: need at least 2 observations");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<TrackObservation> obs;
    obs.reserve(n_obs);
    obs.push_back({path_id, 0.0, x0, y0});
    double t = 0.0, x = x0, y = y0;
    for (std::size_t i = 1; i < n_obs; ++i) {
        const double dt = intervals.sample(rng);
        const double var = 2.0 * law.integrate(t, t + dt);
        const double sd = std::sqrt(var);
        x += drift.beta_x * dt + sd * normal(rng);
        y += drift.beta_y * dt + sd * normal(rng);
        t += dt;
        obs.push_back({path_id, t, x, y});
    }
    return TrackSeries(path_id, std::move(obs));
}

TrackSeries add_noise(const TrackSeries& track, const NoiseModel& model, std::uint64_t seed) {
    if (model.is_none()) return track;
    std::mt19937_64 rng(seed);
    std::vector<TrackObservation> obs = track.observations();
    for (auto& o : obs) {
        o.x += model.sample(rng);
        o.y += model.sample(rng);
    }
    return TrackSeries(track.path_id(), std::move(obs));
}

double max_reflected_step(const DriftVector& drift, double d, const DomainRect& domain) {
    const double l_min = std::min(domain.length_x, domain.length_y);
    const double beta_max = std::max(std::abs(drift.beta_x), std::abs(drift.beta_y));
    double dt = std::numeric_limits<double>::infinity();
    if (d > 0.0) dt = std::min(dt, l_min * l_min / (5000.0 * d));
    if (beta_max > 0.0) dt = std::min(dt, l_min / (100.0 * beta_max));
    return dt;
}

namespace {

// Fold into [0, L]: reflecting boundaries act as a sawtooth map of the free
// coordinate, applied repeatedly for multi-crossings via the 2L period.
double fold(double u, double length) {
    u = std::fmod(u, 2.0 * length);
    if (u < 0.0) u += 2.0 * length;
    return u <= length ? u : 2.0 * length - u;
}

void check_step_rule(const DriftVector& drift, double d, const DomainRect& domain,
                     double dt_step) {
    if (!(dt_step > 0.0)) throw argument_error("dt_step must be > 0");
    const double allowed = max_reflected_step(drift, d, domain);
    if (dt_step > allowed * (1.0 + 1e-12))
        throw argument_error("dt_step too coarse for the domain; use dt_step <= " +
                             std::to_string(allowed));
}

}  // namespace

TrackSeries simulate_reflected_path(const std::string& path_id, const DriftVector& drift,
                                    double d, const DomainRect& domain, double dt_step,
                                    double total_time, double start_x, double start_y,
                                    std::uint64_t seed) {
    if (!(d >= 0.0)) throw argument_error("diffusion coefficient must be >= 0");
    if (!(total_time > 0.0)) throw argument_error("total_time must be > 0");
    if (!(start_x >= 0.0) || start_x > domain.length_x || !(start_y >= 0.0) ||
        start_y > domain.length_y)
        throw argument_error("start position outside the domain");
    check_step_rule(drift, d, domain, dt_step);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<TrackObservation> obs;
    const auto n_steps = static_cast<std::size_t>(std::ceil(total_time / dt_step - 1e-9));
    obs.reserve(n_steps + 1);
    obs.push_back({path_id, 0.0, start_x, start_y});
    double t = 0.0, x = start_x, y = start_y;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double dt = std::min(dt_step, total_time - t);
        const double sd = std::sqrt(2.0 * d * dt);
        x = fold(x + drift.beta_x * dt + sd * normal(rng), domain.length_x);
        y = fold(y + drift.beta_y * dt + sd * normal(rng), domain.length_y);
        t = (i + 1 == n_steps) ? total_time : t + dt;
        obs.push_back({path_id, t, x, y});
    }
    return TrackSeries(path_id, std::move(obs));
}

McProportion mc_migration_proportion(const AreaRect& a_i, const AreaRect& a_f,
                                     const DriftVector& drift, double d, double delta_t_days,
                                     const DomainRect& domain, std::size_t n_paths,
                                     std::uint64_t seed, unsigned n_threads) {
    if (n_paths < 1000)
        throw argument_error("mc_migration_proportion: need at least 1000 paths");
    if (!(delta_t_days > 0.0)) throw argument_error("horizon must be positive");
    a_i.validate_in(domain);
    a_f.validate_in(domain);

    // equal steps at the finest of the resolution rule and the horizon
    const double dt_max = std::min(max_reflected_step(drift, d, domain), delta_t_days);
    const auto n_steps = static_cast<std::size_t>(std::ceil(delta_t_days / dt_max - 1e-9));
    const double dt = delta_t_days / static_cast<double>(n_steps);
    const double sd = std::sqrt(2.0 * d * dt);
    const double drift_x = drift.beta_x * dt;
    const double drift_y = drift.beta_y * dt;

    auto run_range = [&](std::size_t begin, std::size_t end) -> std::size_t {
        std::size_t hits = 0;
        for (std::size_t p = begin; p < end; ++p) {
            std::mt19937_64 rng(derive_seed(seed, p));
            std::uniform_real_distribution<double> ux(a_i.x_lo, a_i.x_hi);
            std::uniform_real_distribution<double> uy(a_i.y_lo, a_i.y_hi);
            std::normal_distribution<double> normal(0.0, 1.0);
            double x = ux(rng);
            double y = uy(rng);
            for (std::size_t s = 0; s < n_steps; ++s) {
                x = fold(x + drift_x + sd * normal(rng), domain.length_x);
                y = fold(y + drift_y + sd * normal(rng), domain.length_y);
            }
            if (x >= a_f.x_lo && x <= a_f.x_hi && y >= a_f.y_lo && y <= a_f.y_hi) ++hits;
        }
        return hits;
    };

    unsigned threads = n_threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, 16);

    std::size_t hits = 0;
    if (threads <= 1 || n_paths < 4000) {
        hits = run_range(0, n_paths);
    } else {
        std::vector<std::size_t> partial(threads, 0);
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_paths + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n_paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, t, begin, end] { partial[t] = run_range(begin, end); });
        }
        for (auto& th : pool) th.join();
        for (std::size_t h : partial) hits += h;
    }

    McProportion out;
    out.n_paths = n_paths;
    out.w_hat = static_cast<double>(hits) / static_cast<double>(n_paths);
    out.std_err = std::sqrt(out.w_hat * (1.0 - out.w_hat) / static_cast<double>(n_paths));
    return out;
}

}  // namespace migprop
