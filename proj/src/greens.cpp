#include "migprop/greens.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "migprop/quadrature.hpp"

namespace migprop {

namespace {

constexpr double inv_sqrt_pi = 0.5641895835477563;  // 1/sqrt(pi)

double gaussian_kernel(double u, double d_int) {
    // variance 2 * d_int
    return std::exp(-u * u / (4.0 * d_int)) / std::sqrt(4.0 * M_PI * d_int);
}

void check_interval(double lo, double hi, double domain_length, const char* what) {
    if (!(hi >= lo) || lo < 0.0 || hi > domain_length)
        throw argument_error(std::string(what) + " must lie inside [0, L]");
}

void check_position(double x, double domain_length, const char* what) {
    if (!(x >= 0.0) || !(x <= domain_length))
        throw argument_error(std::string(what) + " outside [0, L]");
}

// Shared shell-expansion driver. shell(0) is the central image, shell(k) for
// k >= 1 combines image indices +k and -k; callers group the +/-k pieces with
// commutative additions so that the swap/mirror symmetries of the kernel at
// zero drift survive bit-exactly.
template <typename Shell>
double image_sum(Shell&& shell, const ImageSumControl& ctrl, ImageSumStats* stats) {
    ctrl.validate();
    double total = shell(0);
    int k = 0;
    double frac = 1.0;
    while (true) {
        ++k;
        if (k > ctrl.max_images)
            throw convergence_error("image sum: no convergence within max_images=" +
                                    std::to_string(ctrl.max_images));
        const double contrib = shell(k);
        total += contrib;
        frac = std::abs(total) > 0.0 ? std::abs(contrib) / std::abs(total) : 0.0;
        if (k >= ctrl.min_images && std::abs(contrib) < ctrl.tail_tol * std::abs(total))
            break;
    }
    if (stats) {
        stats->shells_used = k;
        stats->last_shell_fraction = frac;
    }
    return total;
}

}  // namespace

double green_free_1d(double dx, double drift_shift, double d_int) {
    if (!(d_int > 0.0)) throw numeric_error("green_free_1d: integrated diffusion must be > 0");
    return gaussian_kernel(dx - drift_shift, d_int);
}

double ftilde(double z, double s) {
    if (!(s > 0.0)) throw numeric_error("ftilde: integrated diffusion must be > 0");
    const double zt = z / (2.0 * std::sqrt(s));
    return 0.5 * (zt * std::erf(zt) + std::exp(-zt * zt) * inv_sqrt_pi);
}

double green_reflected_1d(double x_i, double x_f, double drift_shift, double d_int,
                          double domain_length, const ImageSumControl& ctrl,
                          ImageSumStats* stats) {
    if (!(domain_length > 0.0)) throw argument_error("domain length must be > 0");
    check_position(x_i, domain_length, "initial position");
    check_position(x_f, domain_length, "final position");
    if (!(d_int > 0.0))
        throw numeric_error("green_reflected_1d: integrated diffusion must be > 0");

    auto refl = [&](int n) {
        return gaussian_kernel(x_f + x_i - drift_shift + 2.0 * n * domain_length, d_int);
    };
    auto dir = [&](int n) {
        return gaussian_kernel(x_f - x_i - drift_shift + 2.0 * n * domain_length, d_int);
    };
    auto shell = [&](int k) {
        if (k == 0) return refl(0) + dir(0);
        return (refl(k) + refl(-k)) + (dir(k) + dir(-k));
    };
    return image_sum(shell, ctrl, stats);
}

namespace {

// Box masses of one image term. The double integral of g(x_f +/- x_i + c)
// over the two intervals reduces to second differences of ftilde at the
// interval corners; both pieces are integrals of a positive kernel, so each
// is nonnegative up to rounding. The (uu + ll) - (ul + lu) grouping keeps
// the zero-drift swap symmetry bit-exact.
double refl_mass(double i_lo, double i_hi, double f_lo, double f_hi, double c, double s) {
    return (ftilde(f_hi + i_hi + c, s) + ftilde(f_lo + i_lo + c, s)) -
           (ftilde(f_hi + i_lo + c, s) + ftilde(f_lo + i_hi + c, s));
}

double dir_mass(double i_lo, double i_hi, double f_lo, double f_hi, double c, double s) {
    return (ftilde(f_hi - i_lo + c, s) + ftilde(f_lo - i_hi + c, s)) -
           (ftilde(f_lo - i_lo + c, s) + ftilde(f_hi - i_hi + c, s));
}

}  // namespace

double nx_if(double a_i_lo, double a_i_hi, double a_f_lo, double a_f_hi,
             double drift_shift, double d_int, double domain_length,
             const ImageSumControl& ctrl, ImageSumStats* stats) {
    if (!(domain_length > 0.0)) throw argument_error("domain length must be > 0");
    check_interval(a_i_lo, a_i_hi, domain_length, "initial interval");
    check_interval(a_f_lo, a_f_hi, domain_length, "final interval");
    if (!(d_int > 0.0)) throw numeric_error("nx_if: integrated diffusion must be > 0");
    if (a_i_lo == a_i_hi || a_f_lo == a_f_hi) return 0.0;

    auto refl = [&](int n) {
        return refl_mass(a_i_lo, a_i_hi, a_f_lo, a_f_hi,
                         -drift_shift + 2.0 * n * domain_length, d_int);
    };
    auto dir = [&](int n) {
        return dir_mass(a_i_lo, a_i_hi, a_f_lo, a_f_hi,
                        -drift_shift + 2.0 * n * domain_length, d_int);
    };
    auto shell = [&](int k) {
        if (k == 0) return refl(0) + dir(0);
        return (refl(k) + refl(-k)) + (dir(k) + dir(-k));
    };
    return 2.0 * std::sqrt(d_int) * image_sum(shell, ctrl, stats);
}

double nx_if_quadrature(double a_i_lo, double a_i_hi, double a_f_lo, double a_f_hi,
                        double drift_shift, double d_int, double domain_length,
                        const ImageSumControl& ctrl, double tol_scale) {
    if (!(domain_length > 0.0)) throw argument_error("domain length must be > 0");
    check_interval(a_i_lo, a_i_hi, domain_length, "initial interval");
    check_interval(a_f_lo, a_f_hi, domain_length, "final interval");
    if (!(d_int > 0.0))
        throw numeric_error("nx_if_quadrature: integrated diffusion must be > 0");
    const double w_i = a_i_hi - a_i_lo;
    const double w_f = a_f_hi - a_f_lo;
    if (w_i == 0.0 || w_f == 0.0) return 0.0;

    auto kernel = [&](double x_i, double x_f) {
        return green_reflected_1d(x_i, x_f, drift_shift, d_int, domain_length, ctrl);
    };

    // peak estimate on a coarse grid, corners included
    double peak = 0.0;
    constexpr int grid = 12;
    for (int a = 0; a <= grid; ++a)
        for (int b = 0; b <= grid; ++b)
            peak = std::max(peak, kernel(a_i_lo + w_i * a / grid, a_f_lo + w_f * b / grid));

    const double abs_tol = tol_scale * 1e-10 * peak * w_i * w_f;
    const double inner_tol = 0.25 * abs_tol / w_i;

    auto inner = [&](double x_i) {
        return integrate_adaptive([&](double x_f) { return kernel(x_i, x_f); }, a_f_lo,
                                  a_f_hi, inner_tol);
    };
    return integrate_adaptive(inner, a_i_lo, a_i_hi, 0.5 * abs_tol);
}

}  // namespace migprop
