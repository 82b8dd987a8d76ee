#include "adelic/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "adelic/errors.hpp"

namespace adelic {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// ln(1 - exp(-a)) given ln a.
double log_one_minus_exp_neg(double log_a) {
    if (log_a == neg_inf) return neg_inf;
    if (log_a < -40.0) return log_a;  // 1 - e^{-a} = a to double precision
    const double a = std::exp(log_a);
    if (a < 0.6931471805599453) return std::log(-std::expm1(-a));
    return std::log1p(-std::exp(-a));
}

std::string describe(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

}  // namespace

HeatKernelFin::HeatKernelFin(FiltrationPtr filtration, double alpha, double tolerance,
                             std::optional<IndexWindow> series_window)
    : filtration_(std::move(filtration)), alpha_(alpha), tolerance_(tolerance) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw UsageError("alpha must be a positive real, got " + describe(alpha));
    }
    if (!(tolerance > 0.0)) {
        throw UsageError("tolerance must be positive, got " + describe(tolerance));
    }
    const IndexWindow fw = filtration_->window();
    series_ = series_window.value_or(IndexWindow{fw.lo + 2, fw.hi - 2});
    if (series_.lo > series_.hi || series_.lo < fw.lo + 2 || series_.hi > fw.hi - 2) {
        throw UsageError("series window must lie inside the filtration window shrunk by 2");
    }
}

void HeatKernelFin::check_time(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw UsageError("kernel evaluation needs t > 0, got " + describe(t));
    }
}

double HeatKernelFin::survival(int n, double t) const {
    return std::exp(-std::exp(std::log(t) + alpha_ * filtration_->log_psi(n)));
}

double HeatKernelFin::log_gap(int n, double t) const {
    // E_n - E_{n+1} = E_n (1 - exp(-t e^{alpha psi(n)} (e^{alpha Lambda(n+1)} - 1)))
    const double log_a = std::log(t) + alpha_ * filtration_->log_psi(n);
    const double a = std::exp(log_a);
    if (!std::isfinite(a)) return neg_inf;
    const double log_r = std::log(static_cast<double>(filtration_->ratio(n + 1)));
    const double log_d = log_a + std::log(std::expm1(alpha_ * log_r));
    return -a + log_one_minus_exp_neg(log_d);
}

Certified HeatKernelFin::series(int m, double t, double log_scale, int shift) const {
    const int top = -m;
    const int first = series_.lo;
    const int last = std::min(top, series_.hi);
    Certified out;
    CompensatedSum sum;
    for (int n = first; n <= last; ++n) {
        const double lg = log_gap(n + shift, t);
        if (lg == neg_inf) continue;
        const double term = std::exp(log_scale + filtration_->log_psi(n) + lg);
        if (term == 0.0) out.underflow_clamped = true;
        sum.add(term);
    }
    out.value = sum.value();

    // sum_{n <= N} e^{psi(n)} Delta_{n+shift} <= e^{psi(N)} (1 - E_{N+1+shift})
    const int n_low = std::min(top, first - 1);
    const double log_a = std::log(t) + alpha_ * filtration_->log_psi(n_low + 1 + shift);
    out.remainder = std::exp(log_scale + filtration_->log_psi(n_low) + log_one_minus_exp_neg(log_a));

    if (top > last) {
        if (shift != 0) {
            throw ResourceError("shifted series at m = " + std::to_string(m) +
                                " needs indices above the series window");
        }
        // sum_{n > N} e^{psi(n)} Delta_n <= int_{e^{psi(N+1)}}^inf u d(-e^{-t u^alpha})
        //                                = t^{-1/alpha} Gamma(1/alpha + 1, t e^{alpha psi(N+1)})
        const double x = std::exp(std::log(t) + alpha_ * filtration_->log_psi(last + 1));
        if (std::isfinite(x)) {
            const double g = boost::math::tgamma(1.0 / alpha_ + 1.0, x);
            out.remainder += std::exp(log_scale - std::log(t) / alpha_) * g;
        }
    }
    if (out.underflow_clamped) out.remainder += (last - first + 1) * std::numeric_limits<double>::denorm_min();
    return out;
}

void HeatKernelFin::certify(const Certified& c, const char* what, int index, double t) const {
    if (!(c.remainder <= tolerance_ * std::max(1.0, std::abs(c.value)))) {
        std::ostringstream os;
        os << what << " at index " << index << ", t = " << t << ": truncation bound "
           << c.remainder << " exceeds tolerance " << tolerance_ << " inside series window ["
           << series_.lo << ", " << series_.hi << "]";
        throw PrecisionError(os.str());
    }
}

Certified HeatKernelFin::kernel_radial(int m, double t) const {
    check_time(t);
    const Certified c = series(m, t, 0.0, 0);
    certify(c, "kernel", m, t);
    return c;
}

Certified HeatKernelFin::shell_mass(int m, double t) const {
    check_time(t);
    const double r = static_cast<double>(filtration_->ratio(m));
    const double log_measure = filtration_->log_psi(m) + std::log((r - 1.0) / r);
    const Certified c = series(m, t, log_measure, 0);
    certify(c, "shell mass", m, t);
    return c;
}

Certified HeatKernelFin::tail_direct(int k, double t) const {
    // 1 - F(k) = sum_{n <= -k-1} Delta_n (1 - e^{psi(n) + psi(k)})
    const int top = -k - 1;
    const int first = series_.lo;
    const int last = std::min(top, series_.hi);
    const double psi_k = filtration_->log_psi(k);
    Certified out;
    CompensatedSum sum;
    for (int n = first; n <= last; ++n) {
        const double lg = log_gap(n, t);
        if (lg == neg_inf) continue;
        const double term = std::exp(lg + std::log(-std::expm1(filtration_->log_psi(n) + psi_k)));
        if (term == 0.0) out.underflow_clamped = true;
        sum.add(term);
    }
    out.value = sum.value();
    const int n_low = std::min(top, first - 1);
    out.remainder = -std::expm1(-std::exp(std::log(t) + alpha_ * filtration_->log_psi(n_low + 1)));
    if (top > last) out.remainder += survival(last + 1, t);
    if (out.underflow_clamped) out.remainder += (last - first + 1) * std::numeric_limits<double>::denorm_min();
    return out;
}

Certified HeatKernelFin::cdf_direct(int k, double t) const {
    // F(k) = E_{1-k} + e^{psi(k)} Z_k(t)
    Certified c = series(k, t, filtration_->log_psi(k), 0);
    c.value += survival(1 - k, t);
    return c;
}

// Each side can be summed directly or taken as the complement of the other.
// The direct tail loses the mass beyond the series window when alpha is
// small, while the CDF series weights it by e^{psi(n)}; whichever certificate
// is smaller wins.
Certified HeatKernelFin::radial_tail(int k, double t) const {
    check_time(t);
    Certified best = tail_direct(k, t);
    if (!(best.remainder <= tolerance_ * std::max(1.0, best.value)) || best.value >= 0.5) {
        const Certified c = cdf_direct(k, t);
        const Certified complement{1.0 - c.value, c.remainder + std::numeric_limits<double>::epsilon(),
                                   c.underflow_clamped};
        if (complement.remainder < best.remainder) best = complement;
    }
    certify(best, "radial tail", k, t);
    return best;
}

Certified HeatKernelFin::radial_cdf(int k, double t) const {
    check_time(t);
    Certified best = cdf_direct(k, t);
    if (!(best.remainder <= tolerance_ * std::max(1.0, best.value)) || best.value >= 0.5) {
        const Certified tail = tail_direct(k, t);
        const Certified complement{1.0 - tail.value, tail.remainder + std::numeric_limits<double>::epsilon(),
                                   tail.underflow_clamped};
        if (complement.remainder < best.remainder) best = complement;
    }
    certify(best, "radial cdf", k, t);
    return best;
}

Certified HeatKernelFin::isotropic_kernel_radial(int m, double t) const {
    check_time(t);
    const Certified c = series(m, t, 0.0, -1);
    certify(c, "isotropic kernel", m, t);
    return c;
}

Certified HeatKernelFin::isotropic_shell_mass(int m, double t) const {
    check_time(t);
    const double r = static_cast<double>(filtration_->ratio(m));
    const double log_measure = filtration_->log_psi(m) + std::log((r - 1.0) / r);
    const Certified c = series(m, t, log_measure, -1);
    certify(c, "isotropic shell mass", m, t);
    return c;
}

double HeatKernelFin::uniform_bound(double t) const {
    check_time(t);
    return boost::math::tgamma(1.0 / alpha_ + 1.0) * std::pow(t, -1.0 / alpha_);
}

double HeatKernelFin::pointwise_bound(int m, double t) const {
    check_time(t);
    const double log_a = std::log(t) + alpha_ * filtration_->log_psi(1 - m);
    return std::exp(filtration_->log_psi(-m) + log_one_minus_exp_neg(log_a));
}

double HeatKernelFin::exit_bound(int k, double t) const {
    check_time(t);
    return -std::expm1(-std::exp(std::log(t) + alpha_ * filtration_->log_psi(-k)));
}

BoundReport HeatKernelFin::pointwise_bound_check(int m, double t) const {
    BoundReport r;
    r.m = m;
    r.t = t;
    const Certified z = kernel_radial(m, t);
    r.value = z.value;
    r.remainder = z.remainder;
    r.uniform_bound = uniform_bound(t);
    r.pointwise_bound = pointwise_bound(m, t);
    r.lower_ok = z.value >= 0.0;
    r.upper_ok = z.value <= r.uniform_bound && z.value <= r.pointwise_bound;
    return r;
}

ShellWindow HeatKernelFin::shell_window(double t, double tail_tolerance) const {
    check_time(t);
    const int m_min = -series_.hi;
    const int m_max = -series_.lo;
    std::optional<int> hi;
    for (int m = m_min; m <= m_max; ++m) {
        if (exit_bound(m, t) < tail_tolerance) {
            hi = m;
            break;
        }
    }
    // F(m - 1) = E_{2-m} + e^{psi(m-1)} Z_{m-1} <= E_{2-m} + Gamma(1/alpha + 1) t^{-1/alpha} e^{psi(m-1)}
    const double gamma_bound = uniform_bound(t);
    auto lower_bound = [&](int m) {
        return survival(2 - m, t) + gamma_bound * filtration_->psi_double(m - 1);
    };
    std::optional<int> lo;
    if (hi) {
        for (int m = *hi; m >= m_min; --m) {
            if (lower_bound(m) < tail_tolerance) {
                lo = m;
                break;
            }
        }
    }
    if (!hi || !lo) {
        std::ostringstream os;
        os << "no shell window inside [" << m_min << ", " << m_max << "] has both tails below "
           << tail_tolerance << " at t = " << t << "; widen the filtration window"
           << (hi ? " below its lower end" : " above its upper end");
        throw PrecisionError(os.str());
    }
    return {*lo, *hi, lower_bound(*lo), exit_bound(*hi, t)};
}

MassReport HeatKernelFin::mass_report(double t, std::optional<ShellWindow> window) const {
    MassReport r;
    r.t = t;
    r.window = window ? *window : shell_window(t, tolerance_);
    CompensatedSum sum;
    double remainder = 0.0;
    for (int m = r.window.lo; m <= r.window.hi; ++m) {
        const Certified w = shell_mass(m, t);
        sum.add(w.value);
        remainder += w.remainder;
    }
    r.shell_sum = sum.value();
    const Certified lower = radial_cdf(r.window.lo - 1, t);
    const Certified upper = radial_tail(r.window.hi, t);
    r.lower_tail = lower.value;
    r.upper_tail = upper.value;
    r.series_remainder = remainder + lower.remainder + upper.remainder;
    r.total = r.shell_sum + r.lower_tail + r.upper_tail;
    r.deviation = std::abs(r.total - 1.0);
    return r;
}

KernelView HeatKernelFin::at(double t) const { return KernelView(*this, t); }

KernelView::KernelView(const HeatKernelFin& kernel, double t)
    : kernel_(&kernel), t_(t), top_(kernel.shell_window(t, kernel.tolerance()).hi) {}

double KernelView::sup_beyond(int m) const {
    const Certified z = kernel_->kernel_radial(m + 1, t_);
    return z.value + z.remainder;
}

double KernelView::mass_beyond(int m) const {
    const Certified tail = kernel_->radial_tail(m, t_);
    return tail.value + tail.remainder;
}

double transition_prob_ball(const HeatKernelFin& kernel, double t, const FiniteAdele& x,
                            const FiniteAdele& center, int k) {
    require_same_filtration(x, center);
    if (x.filtration() != kernel.filtration()) {
        throw UsageError("point and kernel use different filtrations");
    }
    if (t < 0.0) throw UsageError("transition probability needs t >= 0");
    const Ball ball{center, k};
    const bool inside = ball.contains(x);
    if (t == 0.0) return inside ? 1.0 : 0.0;
    if (inside) return kernel.radial_cdf(k, t).value;
    // ||x - z|| = ||x - center|| for every z in the ball
    const int m = (x - center).norm_index();
    return kernel.filtration()->psi_double(k) * kernel.kernel_radial(m, t).value;
}

RadialFunction inverse_profile(const RadialProfile& profile) {
    for (const auto& [n, c] : profile.coefficients()) {
        if (c.imag() != 0.0) {
            throw UsageError("shell convolution supports real radial profiles only");
        }
    }
    const auto& f = profile.filtration();
    if (profile.coefficients().empty()) return RadialFunction(f, 0, 0.0, {});
    // F^{-1}(1_{S_n}) is constant on B_{-n} and vanishes outside B_{1-n}.
    const int core = -profile.max_index();
    const int top = 1 - profile.min_index();
    std::map<int, double> shells;
    for (int m = core + 1; m <= top; ++m) {
        const double v = profile.inverse_at(m).real();
        if (v != 0.0) shells[m] = v;
    }
    return RadialFunction(f, core, profile.inverse_at(core).real(), std::move(shells));
}

DiscrepancyReport semigroup_vs_convolution(const HeatKernelFin& kernel,
                                           const RadialProfile& profile, double t) {
    if (profile.filtration() != kernel.filtration()) {
        throw UsageError("profile and kernel use different filtrations");
    }
    DiscrepancyReport report;
    report.t = t;
    const RadialFunction initial = inverse_profile(profile);
    const RadialProfile evolved = profile.apply_semigroup(kernel.alpha(), t);
    const KernelView z = kernel.at(t);
    for (int m = initial.core() - 2; m <= initial.support_top() + 2; ++m) {
        DiscrepancyPoint p;
        p.m = m;
        p.spectral = evolved.inverse_at(m).real();
        const Certified c = radial_convolution(z, initial, m);
        p.convolution = c.value;
        p.remainder = c.remainder;
        report.max_abs_discrepancy =
            std::max(report.max_abs_discrepancy, std::abs(p.spectral - p.convolution));
        report.points.push_back(p);
    }
    return report;
}

nlohmann::json markov_conditions_report(const HeatKernelFin& kernel,
                                        const std::vector<double>& t_grid,
                                        const std::vector<int>& x_grid, int k) {
    if (t_grid.empty() || x_grid.empty()) throw UsageError("Markov condition grids must be nonempty");
    const auto& f = *kernel.filtration();
    const double s = *std::max_element(t_grid.begin(), t_grid.end());
    const double ball = f.psi_double(k);
    bool all_ok = true;

    std::vector<int> xs(x_grid);
    std::sort(xs.begin(), xs.end());
    nlohmann::json lb = nlohmann::json::array();
    bool lb_decreasing = true;
    double previous = std::numeric_limits<double>::infinity();
    for (int m : xs) {
        if (m <= k) continue;  // x inside B_k: the condition concerns distant points
        double measured = 0.0;
        for (double t : t_grid) {
            measured = std::max(measured, ball * kernel.kernel_radial(m, t).value);
        }
        // P(t, x, B) <= ||x||^{-1} (1 - exp(-s e^{alpha psi(1-m)})) mu(B) for t <= s
        const double majorant = ball * kernel.pointwise_bound(m, s);
        const bool ok = measured <= majorant;
        all_ok = all_ok && ok;
        lb_decreasing = lb_decreasing && majorant <= previous;
        previous = majorant;
        lb.push_back({{"norm_index", m}, {"measured", measured}, {"majorant", majorant}, {"ok", ok}});
    }

    std::vector<double> ts(t_grid);
    std::sort(ts.begin(), ts.end());
    nlohmann::json mb = nlohmann::json::array();
    bool mb_monotone = true;
    previous = 0.0;
    for (double t : ts) {
        const double measured = kernel.radial_tail(k, t).value;
        const double majorant = kernel.exit_bound(k, t);
        const bool ok = measured <= majorant;
        all_ok = all_ok && ok;
        mb_monotone = mb_monotone && majorant >= previous;
        previous = majorant;
        mb.push_back({{"t", t}, {"measured", measured}, {"majorant", majorant}, {"ok", ok}});
    }
    return {{"schema_version", 1},
            {"filtration", f.name()},
            {"alpha", kernel.alpha()},
            {"k", k},
            {"s", s},
            {"condition_lb", lb},
            {"condition_mb", mb},
            {"lb_majorant_decreasing", lb_decreasing},
            {"mb_majorant_increasing_in_t", mb_monotone},
            {"all_ok", all_ok && lb_decreasing && mb_monotone}};
}

nlohmann::json to_json(const BoundReport& r) {
    return {{"m", r.m},
            {"t", r.t},
            {"value", r.value},
            {"remainder", r.remainder},
            {"uniform_bound", r.uniform_bound},
            {"pointwise_bound", r.pointwise_bound},
            {"lower_ok", r.lower_ok},
            {"upper_ok", r.upper_ok}};
}

nlohmann::json to_json(const MassReport& r) {
    return {{"t", r.t},
            {"window", {r.window.lo, r.window.hi}},
            {"lower_tail_bound", r.window.lower_tail_bound},
            {"upper_tail_bound", r.window.upper_tail_bound},
            {"shell_sum", r.shell_sum},
            {"lower_tail", r.lower_tail},
            {"upper_tail", r.upper_tail},
            {"series_remainder", r.series_remainder},
            {"total", r.total},
            {"deviation", r.deviation}};
}

nlohmann::json to_json(const DiscrepancyReport& r) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.points) {
        pts.push_back({{"m", p.m},
                       {"spectral", p.spectral},
                       {"convolution", p.convolution},
                       {"remainder", p.remainder}});
    }
    return {{"schema_version", 1},
            {"t", r.t},
            {"points", pts},
            {"max_abs_discrepancy", r.max_abs_discrepancy}};
}

}  // namespace adelic
