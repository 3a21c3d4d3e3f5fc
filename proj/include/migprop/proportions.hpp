#pragma once

// Migration proportions between rectangles of the habitat. The 2-D kernel
// factorizes per axis, so w_if = w_x * w_y with
//   w_axis = nx_if(A_i, A_f) / nx_if(A_i, [0, L])
// (the denominator integrates the final coordinate over the whole domain,
// which makes A_f = domain map to exactly 1).

#include <cstddef>
#include <string>
#include <vector>

#include "migprop/greens.hpp"

namespace migprop {

// Axis-aligned rectangle in domain coordinates.
struct AreaRect {
    std::string name;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;

    AreaRect() = default;
    AreaRect(std::string name_, double x_lo_, double x_hi_, double y_lo_, double y_hi_);

    double area() const { return (x_hi - x_lo) * (y_hi - y_lo); }
    void validate_in(const DomainRect& domain) const;
};

// Drift/diffusion pair per axis, the parameters the kernels consume.
struct PlanarParams {
    double beta_x = 0.0;
    double beta_y = 0.0;
    double d_x = 0.0;  // length^2/day, must be > 0 for proportions
    double d_y = 0.0;
};

struct ProportionMatrix {
    std::vector<std::string> initial_names;
    std::vector<std::string> final_names;
    std::vector<std::vector<double>> entries;  // [initial][final]
    std::vector<double> row_sums;
    double horizon = 0.0;
    PlanarParams params;
    bool final_is_partition = false;
};

// One-axis proportion of mass from interval A_i landing in interval A_f.
double proportion_axis(double a_i_lo, double a_i_hi, double a_f_lo, double a_f_hi,
                       double drift_shift, double d_int, double domain_length,
                       const ImageSumControl& ctrl = {});

// Full 2-D proportion for rectangles over horizon delta_t_days.
double migration_proportion(const AreaRect& a_i, const AreaRect& a_f,
                            const PlanarParams& params, double delta_t_days,
                            const DomainRect& domain, const ImageSumControl& ctrl = {});

// Tabulates migration_proportion over all (initial, final) pairs. With
// check_partition the final areas must tile the domain (pairwise disjoint,
// areas summing to |domain|), and every row sum is asserted to be 1 within
// 1e-10.
ProportionMatrix proportion_matrix(const std::vector<AreaRect>& initial,
                                   const std::vector<AreaRect>& final_areas,
                                   const PlanarParams& params, double delta_t_days,
                                   const DomainRect& domain,
                                   const ImageSumControl& ctrl = {},
                                   bool check_partition = false);

}  // namespace migprop
