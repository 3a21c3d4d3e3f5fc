#pragma once

// Ground-truth generators. Free paths use exact Gaussian transition sampling
// (no discretization error); reflected paths use Euler steps with fold
// reflection into the domain, which for zero drift reproduces the reflecting
// kernel exactly at the step times. All generators are reproducible from a
// (seed, parameters) tuple, independent of thread count.

#include <cstdint>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "migprop/greens.hpp"
#include "migprop/model.hpp"
#include "migprop/proportions.hpp"

namespace migprop {

// Distribution of the sampling intervals dt.
class IntervalDistribution {
  public:
    static IntervalDistribution fixed(std::vector<double> values, std::vector<double> weights);
    static IntervalDistribution uniform_range(double lo, double hi);
    static IntervalDistribution exponential(double mean);

    double sample(std::mt19937_64& rng) const;

  private:
    struct Fixed {
        std::vector<double> values;
        std::vector<double> cumulative;  // cumulative weights, last == 1
    };
    struct UniformRange {
        double lo, hi;
    };
    struct Exponential {
        double mean;
    };
    using Spec = std::variant<Fixed, UniformRange, Exponential>;
    explicit IntervalDistribution(Spec spec) : spec_(std::move(spec)) {}
    Spec spec_;
};

// Measurement-noise law with closed-form cumulants.
class NoiseModel {
  public:
    static NoiseModel none();
    static NoiseModel gaussian(double sigma0);
    static NoiseModel uniform(double half_width);
    static NoiseModel laplace(double scale);

    ErrorCumulants cumulants() const;
    double sample(std::mt19937_64& rng) const;
    bool is_none() const;

  private:
    enum class Kind { none, gaussian, uniform, laplace };
    NoiseModel(Kind kind, double param) : kind_(kind), param_(param) {}
    Kind kind_;
    double param_;
};

// Free drift-diffusion track: n_obs observations at irregular intervals,
// independent x/y axes, exact per-step transition sampling.
TrackSeries simulate_free_path(const std::string& path_id, const DriftVector& drift,
                               const DiffusionLaw& law, const IntervalDistribution& intervals,
                               std::size_t n_obs, double x0, double y0, std::uint64_t seed);

// Adds i.i.d. measurement noise to every observation.
TrackSeries add_noise(const TrackSeries& track, const NoiseModel& model, std::uint64_t seed);

// Largest Euler step allowed by the resolution rule
//   sqrt(2 D dt) <= L_min/50   and   |beta| dt <= L_min/100.
double max_reflected_step(const DriftVector& drift, double d, const DomainRect& domain);

// Reflected path in the domain, Euler steps of dt_step (the final step is
// shortened to land exactly on total_time).
TrackSeries simulate_reflected_path(const std::string& path_id, const DriftVector& drift,
                                    double d, const DomainRect& domain, double dt_step,
                                    double total_time, double start_x, double start_y,
                                    std::uint64_t seed);

struct McProportion {
    double w_hat = 0.0;
    double std_err = 0.0;
    std::size_t n_paths = 0;
};

// Monte Carlo oracle for the migration proportion: paths start uniform in
// a_i, evolve reflected for delta_t_days, and are counted in a_f. Path
// streams are derived from (seed, path index), so the result is identical
// for any thread count.
McProportion mc_migration_proportion(const AreaRect& a_i, const AreaRect& a_f,
                                     const DriftVector& drift, double d, double delta_t_days,
                                     const DomainRect& domain, std::size_t n_paths,
                                     std::uint64_t seed, unsigned n_threads = 0);

}  // namespace migprop
