#pragma once

#include <vector>

#include "json.hpp"

#include "adelic/radial.hpp"
#include "adelic/random.hpp"

namespace adelic {

struct QuadratureConfig {
    int max_intervals = 4000;     // half periods of the oscillation before giving up
    double cutoff = 1e-16;        // e^{-xi^beta} below this ends the integration range
    double relative_tol = 1e-14;  // target for the accelerated tail
};

/**
 * Symmetric beta-stable heat kernel on R under the pairing e^{-2 pi i x xi}:
 *
 *   Z(x, t) = int_R e^{-2 pi i x xi} e^{-t |xi|^beta} dxi = 2 int_0^inf e^{-t xi^beta} cos(2 pi xi x) dxi.
 *
 * General beta goes through the self-similar form Z(x, t) = t^{-1/beta} Z(t^{-1/beta} x, 1)
 * and an oscillatory quadrature over half periods with Wynn epsilon
 * acceleration of the partial sums.
 */
class StableKernel {
public:
    explicit StableKernel(double beta, QuadratureConfig config = {});

    double beta() const { return beta_; }
    const QuadratureConfig& config() const { return config_; }

    // Closed form for beta in {1, 2}, quadrature otherwise.
    Certified eval(double x, double t) const;

    // Always numeric, for any beta.
    Certified quadrature(double x, double t) const;

    // P(|X_t| <= a) = (2/pi) int_0^inf e^{-t xi^beta} sin(2 pi a xi) / xi dxi.
    Certified interval_mass(double a, double t) const;

    // int_R Z(x, t) dx by quadrature of the density in x = e^s.
    Certified normalization(double t) const;

    // int_R Z(x - y, t) Z(y, s) dy by quadrature.
    Certified convolution(double x, double t, double s) const;

    // Right side of Z(x, t) <= C t^{1/beta} / (t^{2/beta} + x^2).
    static double bound_shape(double beta, double x, double t);

    // sup of Z(u, 1)(1 + u^2) over u in [0, u_max], refined around the best
    // grid point. Finite as u_max -> inf only for beta >= 1.
    double fitted_constant(double u_max, int grid_points = 400) const;

    double sample(double t, RandomStream& rng) const;

private:
    Certified unit_density(double u) const;
    Certified unit_mass(double a) const;

    double beta_;
    QuadratureConfig config_;
};

}  // namespace adelic
