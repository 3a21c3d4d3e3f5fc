#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "migprop/errors.hpp"

namespace migprop {

// Neumaier compensated accumulator. Keeps running error-free corrections so
// long alternating sums (telescoping increments, bootstrap totals) do not
// drift.
class neumaier_sum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
    neumaier_sum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

// SplitMix64: used only to derive independent substream seeds from
// (master seed, index) pairs so that parallel execution order cannot
// change results.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Quantile with Weibull plotting positions (type 6): q(k/(m+1)) is exactly
// the k-th order statistic, so a sample qq-plotted against itself sits on
// the diagonal.
inline double quantile_type6(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw argument_error("quantile of empty sample");
    const double m = static_cast<double>(sorted.size());
    const double h = p * (m + 1.0);
    if (h <= 1.0) return sorted.front();
    if (h >= m) return sorted.back();
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

struct sample_moments {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;   // unbiased
    double skew = 0.0;  // g1 = m3 / m2^{3/2}
    double exkurt = 0.0;  // g2 = m4 / m2^2 - 3
};

inline sample_moments compute_moments(std::span<const double> xs) {
    sample_moments out;
    out.n = xs.size();
    if (xs.empty()) return out;
    neumaier_sum s;
    for (double x : xs) s.add(x);
    out.mean = s.value() / static_cast<double>(xs.size());
    neumaier_sum s2, s3, s4;
    for (double x : xs) {
        const double d = x - out.mean;
        const double d2 = d * d;
        s2.add(d2);
        s3.add(d2 * d);
        s4.add(d2 * d2);
    }
    const double n = static_cast<double>(xs.size());
    const double m2 = s2.value() / n;
    const double m3 = s3.value() / n;
    const double m4 = s4.value() / n;
    out.var = xs.size() > 1 ? s2.value() / (n - 1.0) : 0.0;
    out.skew = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
    out.exkurt = m2 > 0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    return out;
}

inline double sample_mean(std::span<const double> xs) {
    neumaier_sum s;
    for (double x : xs) s.add(x);
    return xs.empty() ? 0.0 : s.value() / static_cast<double>(xs.size());
}

inline double sample_sd(std::span<const double> xs) {
    return std::sqrt(compute_moments(xs).var);
}

// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace migprop
