#pragma once

// Domain types for discretely observed planar diffusion tracks, plus the
// joint-cumulant calculus of observed (noisy) increments.
//
// Conventions used throughout:
//   - per-axis increment variance over an interval is 2 * integral(D dt)
//   - measurement errors are i.i.d., mean zero, described by cumulants
//     (variance sigma0^2, k3, k4)
//   - observed increment i couples to its neighbours only through the
//     shared endpoint error.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "migprop/errors.hpp"

namespace migprop {

struct TrackObservation {
    std::string path_id;
    double t = 0.0;  // days
    double x = 0.0;
    double y = 0.0;
};

// One path: ordered observations, strictly increasing time.
class TrackSeries {
  public:
    TrackSeries(std::string path_id, std::vector<TrackObservation> observations);

    const std::string& path_id() const { return path_id_; }
    const std::vector<TrackObservation>& observations() const { return observations_; }
    std::size_t size() const { return observations_.size(); }

  private:
    std::string path_id_;
    std::vector<TrackObservation> observations_;
};

enum class Axis { x, y };

inline const char* axis_name(Axis a) { return a == Axis::x ? "x" : "y"; }

struct Increment {
    double dv = 0.0;  // coordinate step
    double dt = 0.0;  // elapsed days, always > 0
};

// Per-axis increments of one track; the statistical atoms of everything else.
class IncrementSeries {
  public:
    IncrementSeries(Axis axis, std::vector<Increment> deltas);

    Axis axis() const { return axis_; }
    const std::vector<Increment>& deltas() const { return deltas_; }
    std::size_t n() const { return deltas_.size(); }

    double total_dt() const;  // compensated sum of dt
    double total_dv() const;  // compensated sum of dv (telescopes to last - first)

  private:
    Axis axis_;
    std::vector<Increment> deltas_;
};

// Measurement-error law by cumulants; k1 is zero by construction.
struct ErrorCumulants {
    double variance = 0.0;  // sigma0^2, length^2
    double k3 = 0.0;        // length^3
    double k4 = 0.0;        // length^4

    ErrorCumulants() = default;
    ErrorCumulants(double variance_, double k3_, double k4_);
};

// Constant or piecewise-constant D(t). values[i] applies on
// [breakpoints[i], breakpoints[i+1]); the last value extends to +inf and the
// first backwards to -inf.
class DiffusionLaw {
  public:
    static DiffusionLaw constant(double d);
    static DiffusionLaw piecewise(std::vector<double> breakpoints, std::vector<double> values);

    bool is_constant() const { return breakpoints_.empty(); }
    double constant_value() const { return values_.front(); }
    double value_at(double t) const;

    // integral of D(t) dt over [t0, t1]; exact for piecewise-constant laws.
    double integrate(double t0, double t1) const;

  private:
    DiffusionLaw(std::vector<double> breakpoints, std::vector<double> values);
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

struct DriftVector {
    double beta_x = 0.0;  // length/day
    double beta_y = 0.0;
};

// Whole-path totals. delta_x/delta_y are compensated increment sums, which
// telescope to the endpoint differences.
struct PathSummary {
    double delta_t = 0.0;
    double delta_x = 0.0;
    double delta_y = 0.0;
    std::size_t n = 0;
};

// ---- operations -----------------------------------------------------------

std::pair<IncrementSeries, IncrementSeries> extract_increments(const TrackSeries& track);

PathSummary summarize_path(const TrackSeries& track);

double integrate_diffusion(const DiffusionLaw& law, double t0, double t1);

// Covariance of observed increments i and j (1-based) for a track whose
// interval lengths are dt_seq (t0 = 0 origin for time-dependent D):
//   i == j      -> 2 * int D dt + 2 sigma0^2
//   |i - j| == 1 -> -sigma0^2     (shared endpoint error)
//   |i - j| >= 2 -> 0
double obs_increment_cov(std::size_t i, std::size_t j, const DiffusionLaw& law,
                         const ErrorCumulants& err, const std::vector<double>& dt_seq);

// Joint cumulant of order a >= 3 with a_i copies of increment i and a - a_i
// copies of increment j. Only the error terms survive:
//   i == j  -> (1 + (-1)^a) k_a
//   j == i-1 -> (-1)^{a_i} k_a
//   j == i+1 -> (-1)^{a - a_i} k_a
//   otherwise 0
double joint_cumulant_obs(int a, std::size_t i, std::size_t j, int a_i,
                          const ErrorCumulants& err);

struct DeltaXCumulants {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
};

// Cumulants of the whole-path displacement sum(dx_i^obs). The increment sum
// telescopes to x_n - x_0 + eps_n - eps_0, so only two error terms survive:
// k3 = 0 and k4 = 2 k4_eps regardless of n.
DeltaXCumulants deltaX_cumulants(std::size_t n, const DiffusionLaw& law,
                                 const std::vector<double>& dt_seq, double beta,
                                 const ErrorCumulants& err);

// u_i = (dx_i - beta dt_i) / sqrt(2 D dt_i [+ 2 sigma0^2]); mean 0, variance 1
// under the generating model when include_error matches the data.
std::vector<double> standardize_increments(const IncrementSeries& incs, double beta,
                                           double d_eff, bool include_error,
                                           double sigma0_sq);

}  // namespace migprop
