#include "migprop/proportions.hpp"

#include <cmath>

#include "migprop/errors.hpp"
#include "migprop/math_util.hpp"

namespace migprop {

namespace {

constexpr double kBoundSlack = 1e-10;

// Clamp to [0,1] only when the violation is rounding-sized.
double clamp_proportion(double w, const char* what) {
    if (w < 0.0) {
        if (w < -kBoundSlack)
            throw numeric_error(std::string(what) + ": proportion " + std::to_string(w) +
                                " below 0 beyond rounding tolerance");
        return 0.0;
    }
    if (w > 1.0) {
        if (w > 1.0 + kBoundSlack)
            throw numeric_error(std::string(what) + ": proportion " + std::to_string(w) +
                                " above 1 beyond rounding tolerance");
        return 1.0;
    }
    return w;
}

}  // namespace

AreaRect::AreaRect(std::string name_, double x_lo_, double x_hi_, double y_lo_, double y_hi_)
    : name(std::move(name_)), x_lo(x_lo_), x_hi(x_hi_), y_lo(y_lo_), y_hi(y_hi_) {
    if (!(x_lo >= 0.0) || !(y_lo >= 0.0) || !(x_hi > x_lo) || !(y_hi > y_lo))
        throw argument_error("area '" + name + "': need 0 <= lo < hi per axis");
}

void AreaRect::validate_in(const DomainRect& domain) const {
    if (x_hi > domain.length_x || y_hi > domain.length_y)
        throw argument_error("area '" + name + "' extends outside the domain");
}

double proportion_axis(double a_i_lo, double a_i_hi, double a_f_lo, double a_f_hi,
                       double drift_shift, double d_int, double domain_length,
                       const ImageSumControl& ctrl) {
    if (!(d_int > 0.0)) throw numeric_error("diffusion parameter must be positive");
    const double denom =
        nx_if(a_i_lo, a_i_hi, 0.0, domain_length, drift_shift, d_int, domain_length, ctrl);
    if (!(denom > 0.0))
        throw numeric_error("proportion_axis: vanishing full-domain normalizer");
    const double numer =
        nx_if(a_i_lo, a_i_hi, a_f_lo, a_f_hi, drift_shift, d_int, domain_length, ctrl);
    return clamp_proportion(numer / denom, "proportion_axis");
}

double migration_proportion(const AreaRect& a_i, const AreaRect& a_f,
                            const PlanarParams& params, double delta_t_days,
                            const DomainRect& domain, const ImageSumControl& ctrl) {
    if (!(delta_t_days > 0.0)) throw argument_error("horizon must be positive");
    if (!(params.d_x > 0.0) || !(params.d_y > 0.0))
        throw numeric_error("diffusion parameter must be positive");
    a_i.validate_in(domain);
    a_f.validate_in(domain);
    const double wx =
        proportion_axis(a_i.x_lo, a_i.x_hi, a_f.x_lo, a_f.x_hi, params.beta_x * delta_t_days,
                        params.d_x * delta_t_days, domain.length_x, ctrl);
    const double wy =
        proportion_axis(a_i.y_lo, a_i.y_hi, a_f.y_lo, a_f.y_hi, params.beta_y * delta_t_days,
                        params.d_y * delta_t_days, domain.length_y, ctrl);
    return clamp_proportion(wx * wy, "migration_proportion");
}

namespace {

bool rects_overlap(const AreaRect& a, const AreaRect& b) {
    const double eps = 1e-12;
    return a.x_lo < b.x_hi - eps && b.x_lo < a.x_hi - eps && a.y_lo < b.y_hi - eps &&
           b.y_lo < a.y_hi - eps;
}

void check_partition_of(const std::vector<AreaRect>& areas, const DomainRect& domain) {
    neumaier_sum total;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        total.add(areas[i].area());
        for (std::size_t j = i + 1; j < areas.size(); ++j)
            if (rects_overlap(areas[i], areas[j]))
                throw argument_error("partition areas '" + areas[i].name + "' and '" +
                                     areas[j].name + "' overlap");
    }
    const double dom_area = domain.length_x * domain.length_y;
    if (std::abs(total.value() - dom_area) > 1e-9 * dom_area)
        throw argument_error("partition areas do not tile the domain");
}

}  // namespace

ProportionMatrix proportion_matrix(const std::vector<AreaRect>& initial,
                                   const std::vector<AreaRect>& final_areas,
                                   const PlanarParams& params, double delta_t_days,
                                   const DomainRect& domain, const ImageSumControl& ctrl,
                                   bool check_partition) {
    if (initial.empty() || final_areas.empty())
        throw argument_error("proportion_matrix: need at least one initial and one final area");
    if (check_partition) check_partition_of(final_areas, domain);

    ProportionMatrix m;
    m.horizon = delta_t_days;
    m.params = params;
    m.final_is_partition = check_partition;
    for (const auto& a : initial) m.initial_names.push_back(a.name);
    for (const auto& a : final_areas) m.final_names.push_back(a.name);

    m.entries.resize(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        m.entries[i].reserve(final_areas.size());
        neumaier_sum row;
        for (const auto& af : final_areas) {
            const double w =
                migration_proportion(initial[i], af, params, delta_t_days, domain, ctrl);
            m.entries[i].push_back(w);
            row.add(w);
        }
        m.row_sums.push_back(row.value());
        if (check_partition && std::abs(row.value() - 1.0) > 1e-10)
            throw numeric_error("proportion_matrix: row '" + initial[i].name +
                                "' sums to " + std::to_string(row.value()) +
                                " over a partition of the domain");
    }
    return m;
}

}  // namespace migprop
