#pragma once

#include <optional>
#include <vector>

#include "json.hpp"

#include "adelic/adele.hpp"
#include "adelic/filtration.hpp"
#include "adelic/radial.hpp"
#include "adelic/schwartz.hpp"

namespace adelic {

// Closed range of shell indices [lo, hi] carrying all but a certified mass.
struct ShellWindow {
    int lo = 0;
    int hi = 0;
    double lower_tail_bound = 0.0;  // bound on P(||X|| <= e^{psi(lo-1)})
    double upper_tail_bound = 0.0;  // bound on P(||X|| > e^{psi(hi)})
};

struct BoundReport {
    int m = 0;
    double t = 0.0;
    double value = 0.0;
    double remainder = 0.0;
    double uniform_bound = 0.0;    // Gamma(1/alpha + 1) t^{-1/alpha}
    double pointwise_bound = 0.0;  // e^{psi(-m)} (1 - exp(-t e^{alpha psi(1-m)}))
    bool lower_ok = false;         // value >= 0
    bool upper_ok = false;         // value below both bounds
};

struct MassReport {
    double t = 0.0;
    ShellWindow window;
    double shell_sum = 0.0;
    double lower_tail = 0.0;  // F(lo - 1), computed in closed form
    double upper_tail = 0.0;  // 1 - F(hi), computed in closed form
    double series_remainder = 0.0;
    double total = 0.0;
    double deviation = 0.0;  // |total - 1|
};

class KernelView;

/**
 * The heat kernel Z(x, t) of D^alpha on A_f, evaluated by norm index m with
 * ||x|| = e^{psi(m)}:
 *
 *   Z_m(t) = sum_{n <= -m} e^{psi(n)} (E_n - E_{n+1}),  E_n = exp(-t e^{alpha psi(n)}).
 *
 * The sum runs over the series window [n_lo, n_hi]; everything outside it is
 * bounded and reported as the remainder. Pointwise bounds are often stated
 * with ||x|| = e^{-psi(m')}; that index is m' = -m.
 */
class HeatKernelFin {
public:
    // The default series window is the filtration window shrunk by 2 so that
    // e^{psi(n +- 1)} stay available.
    HeatKernelFin(FiltrationPtr filtration, double alpha, double tolerance = 1e-12,
                  std::optional<IndexWindow> series_window = std::nullopt);

    const FiltrationPtr& filtration() const { return filtration_; }
    double alpha() const { return alpha_; }
    double tolerance() const { return tolerance_; }
    IndexWindow series_window() const { return series_; }

    // E_n and ln(E_n - E_{n+1}), the latter -inf on underflow.
    double survival(int n, double t) const;
    double log_gap(int n, double t) const;

    Certified kernel_radial(int m, double t) const;
    Certified shell_mass(int m, double t) const;

    // P(||X_t|| <= e^{psi(k)}) and its complement.
    Certified radial_cdf(int k, double t) const;
    Certified radial_tail(int k, double t) const;

    // Kernel with the index shift sum_{n <= -m} e^{psi(n)} (E_{n-1} - E_n).
    Certified isotropic_kernel_radial(int m, double t) const;
    Certified isotropic_shell_mass(int m, double t) const;

    double uniform_bound(double t) const;
    double pointwise_bound(int m, double t) const;
    // 1 - exp(-t e^{alpha psi(-k)}), the bound on the mass outside B_k.
    double exit_bound(int k, double t) const;

    BoundReport pointwise_bound_check(int m, double t) const;

    // Smallest window whose two tail bounds are each below tail_tolerance.
    // Throws PrecisionError naming the window that would be needed.
    ShellWindow shell_window(double t, double tail_tolerance) const;

    MassReport mass_report(double t, std::optional<ShellWindow> window = std::nullopt) const;

    KernelView at(double t) const;

private:
    void check_time(double t) const;
    Certified series(int m, double t, double log_scale, int shift) const;
    Certified tail_direct(int k, double t) const;
    Certified cdf_direct(int k, double t) const;
    void certify(const Certified& c, const char* what, int index, double t) const;

    FiltrationPtr filtration_;
    double alpha_;
    double tolerance_;
    IndexWindow series_;
};

// Z(., t) as a RadialLike object for the shell convolution.
class KernelView {
public:
    KernelView(const HeatKernelFin& kernel, double t);

    const Filtration& filtration() const { return *kernel_->filtration(); }
    double shell_value(int m) const { return kernel_->kernel_radial(m, t_).value; }
    double shell_mass(int m) const { return kernel_->shell_mass(m, t_).value; }
    double ball_integral(int k) const { return kernel_->radial_cdf(k, t_).value; }
    double sup_beyond(int m) const;
    double mass_beyond(int m) const;
    int support_top() const { return top_; }

private:
    const HeatKernelFin* kernel_;
    double t_;
    int top_;
};

// P(t, x, B) for the ball B = center + B_k; t = 0 gives 1_B(x).
double transition_prob_ball(const HeatKernelFin& kernel, double t, const FiniteAdele& x,
                            const FiniteAdele& center, int k);

struct DiscrepancyPoint {
    int m = 0;
    double spectral = 0.0;
    double convolution = 0.0;
    double remainder = 0.0;
};

struct DiscrepancyReport {
    double t = 0.0;
    std::vector<DiscrepancyPoint> points;
    double max_abs_discrepancy = 0.0;
};

// Spectral action exp(-t ||xi||^alpha) on a real radial profile against the
// shell convolution Z(., t) * F^{-1}(profile), at every shell where either
// side can be nonzero.
DiscrepancyReport semigroup_vs_convolution(const HeatKernelFin& kernel,
                                           const RadialProfile& profile, double t);

// F^{-1}(profile) as a finite radial function.
RadialFunction inverse_profile(const RadialProfile& profile);

// Condition LB over the norm indices x_grid (against B_k around 0, with
// s = max t_grid) and Condition MB over t_grid for the ball B_k(x).
nlohmann::json markov_conditions_report(const HeatKernelFin& kernel,
                                        const std::vector<double>& t_grid,
                                        const std::vector<int>& x_grid, int k);

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const MassReport& r);
nlohmann::json to_json(const DiscrepancyReport& r);

}  // namespace adelic
