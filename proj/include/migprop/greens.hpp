#pragma once

// Closed-form transition kernels of the planar drift-diffusion process.
//
// Everything is per-axis and parameterized by
//   s  = integral of D(t) dt over the transition horizon  (length^2)
//   c  = drift displacement beta * horizon                (length)
// so a transition kernel has variance 2s and mean shift c.
//
// Free space: a single Gaussian. Reflecting interval [0, L]: the image sum
//   G(x_f | x_i) = sum_n  g(x_f + x_i + c_n)  +  g(x_f - x_i + c_n),
//   c_n = -c + 2 n L,
// which for c = 0 is the exact zero-flux kernel. Box-to-box masses
// integrate in closed form through the second antiderivative of g,
//   ftilde(z, s) = (zt erf(zt) + exp(-zt^2)/sqrt(pi)) / 2,  zt = z/(2 sqrt(s)),
// evaluated at the four corner sums/differences of the two intervals.

#include <cstdint>

#include "migprop/errors.hpp"

namespace migprop {

// Habitat rectangle [0, L_x] x [0, L_y] (coordinates already shifted so the
// lower-left corner is the origin).
struct DomainRect {
    double length_x = 0.0;
    double length_y = 0.0;

    DomainRect() = default;
    DomainRect(double lx, double ly) : length_x(lx), length_y(ly) {
        if (!(lx > 0.0) || !(ly > 0.0))
            throw argument_error("domain lengths must be positive");
    }
};

// Truncation policy for the image sums. Shells |n| = 0, 1, 2, ... are added
// symmetrically until the last shell is below tail_tol of the running total
// (never stopping before min_images shells).
struct ImageSumControl {
    double tail_tol = 1e-12;
    int max_images = 10000;
    int min_images = 2;

    void validate() const {
        if (!(tail_tol > 0.0) || !(tail_tol < 1.0))
            throw argument_error("tail_tol must be in (0, 1)");
        if (max_images < min_images || min_images < 0)
            throw argument_error("need max_images >= min_images >= 0");
    }
};

// Diagnostics of one image-sum evaluation.
struct ImageSumStats {
    int shells_used = 0;           // largest |n| summed
    double last_shell_fraction = 0.0;  // |last shell| / |total|
};

// Free 1-D kernel: density of a displacement dx when the mean shift is
// drift_shift and the accumulated diffusion is d_int = integral D dt.
double green_free_1d(double dx, double drift_shift, double d_int);

// Second antiderivative of the free kernel (dimensionless form); even in z,
// asymptotically |z|/(4 sqrt(s)).
double ftilde(double z, double s);

// Reflecting-interval kernel on [0, L] via the image sum.
double green_reflected_1d(double x_i, double x_f, double drift_shift, double d_int,
                          double domain_length, const ImageSumControl& ctrl = {},
                          ImageSumStats* stats = nullptr);

// Closed-form double integral of the reflecting kernel over
// x_i in [a_i_lo, a_i_hi], x_f in [a_f_lo, a_f_hi]. This is the per-axis
// box-to-box mass; ratios of these masses are the migration proportions,
// so any factor common to all boxes is irrelevant.
double nx_if(double a_i_lo, double a_i_hi, double a_f_lo, double a_f_hi,
             double drift_shift, double d_int, double domain_length,
             const ImageSumControl& ctrl = {}, ImageSumStats* stats = nullptr);

// Independent oracle for nx_if: nested adaptive quadrature of the image-sum
// kernel itself, to an absolute tolerance of tol_scale * 1e-10 * peak * area.
double nx_if_quadrature(double a_i_lo, double a_i_hi, double a_f_lo, double a_f_hi,
                        double drift_shift, double d_int, double domain_length,
                        const ImageSumControl& ctrl = {}, double tol_scale = 1.0);

}  // namespace migprop
