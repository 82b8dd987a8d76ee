#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <map>

#include "adelic/errors.hpp"
#include "adelic/filtration.hpp"

namespace adelic {

// A computed value together with a certified bound on its truncation error.
struct Certified {
    double value = 0.0;
    double remainder = 0.0;
    bool underflow_clamped = false;
};

// Compensated (Neumaier) summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/**
 * A radial function on A_f seen through its shells: value f_m on S_m, shell
 * mass f_m mu(S_m), ball integral over B_k, and bounds on what lies beyond a
 * shell index.
 */
template <class R>
concept RadialLike = requires(const R& r, int m) {
    { r.filtration() } -> std::convertible_to<const Filtration&>;
    { r.shell_value(m) } -> std::convertible_to<double>;
    { r.shell_mass(m) } -> std::convertible_to<double>;
    { r.ball_integral(m) } -> std::convertible_to<double>;
    // sup_{l > m} |f_l| and the integral of |f| outside B_m
    { r.sup_beyond(m) } -> std::convertible_to<double>;
    { r.mass_beyond(m) } -> std::convertible_to<double>;
    // Past this shell index the tail bounds above are negligible.
    { r.support_top() } -> std::convertible_to<int>;
};

/**
 * (f * g)(x) at ||x|| = e^{psi(m)} by the exact shell decomposition:
 * y in B_{m-1} keeps ||x - y|| = ||x||, y in S_l with l > m gives
 * ||x - y|| = ||y||, and y in S_m sweeps B_m minus the coset x + B_{m-1}.
 * The remainder bounds the shells above max(m, top) that are not summed.
 */
template <RadialLike F, RadialLike G>
Certified radial_convolution(const F& f, const G& g, int m) {
    const Filtration& filt = f.filtration();
    const double r = static_cast<double>(filt.ratio(m));
    const double fm = f.shell_value(m);
    const double gm = g.shell_value(m);
    // f_m (e^{psi(m)} - 2 e^{psi(m-1)}) = f_m mu(S_m) (r - 2) / (r - 1)
    const double inner = f.ball_integral(m - 1) + f.shell_mass(m) * ((r - 2.0) / (r - 1.0));

    CompensatedSum sum;
    sum.add(fm * g.ball_integral(m - 1));
    sum.add(gm * inner);
    const int top = std::max(m, std::min(f.support_top(), g.support_top()));
    for (int l = m + 1; l <= top; ++l) {
        const double gl = g.shell_value(l);
        if (gl != 0.0) sum.add(f.shell_mass(l) * gl);
    }
    return {sum.value(), f.sup_beyond(top) * g.mass_beyond(top), false};
}

/**
 * Finitely described radial function: a constant core value on B_core, shell
 * values on S_m for core < m <= top, and zero outside B_top.
 */
class RadialFunction {
public:
    RadialFunction(FiltrationPtr filtration, int core, double core_value,
                   std::map<int, double> shells)
        : filtration_(std::move(filtration)), core_(core), core_value_(core_value),
          shells_(std::move(shells)) {
        top_ = core_;
        for (const auto& [m, v] : shells_) {
            if (m <= core_) throw UsageError("shell index inside the core ball");
            top_ = std::max(top_, m);
        }
    }

    const Filtration& filtration() const { return *filtration_; }
    int core() const { return core_; }

    double shell_value(int m) const {
        if (m <= core_) return core_value_;
        const auto it = shells_.find(m);
        return it == shells_.end() ? 0.0 : it->second;
    }

    double shell_mass(int m) const {
        const double v = shell_value(m);
        return v == 0.0 ? 0.0 : v * filtration_->sphere_measure_double(m);
    }

    double ball_integral(int k) const {
        if (k <= core_) return core_value_ * filtration_->psi_double(k);
        CompensatedSum sum;
        sum.add(core_value_ * filtration_->psi_double(core_));
        for (const auto& [m, v] : shells_) {
            if (m > k) break;
            sum.add(v * filtration_->sphere_measure_double(m));
        }
        return sum.value();
    }

    double sup_beyond(int m) const {
        double s = m < core_ ? std::abs(core_value_) : 0.0;
        for (auto it = shells_.upper_bound(m); it != shells_.end(); ++it) {
            s = std::max(s, std::abs(it->second));
        }
        return s;
    }

    double mass_beyond(int m) const {
        double s = 0.0;
        for (auto it = shells_.upper_bound(m); it != shells_.end(); ++it) {
            s += std::abs(it->second) * filtration_->sphere_measure_double(it->first);
        }
        if (m < core_) s += std::abs(core_value_) * (filtration_->psi_double(core_) -
                                                     filtration_->psi_double(m));
        return s;
    }

    int support_top() const { return top_; }

private:
    FiltrationPtr filtration_;
    int core_;
    double core_value_;
    std::map<int, double> shells_;
    int top_;
};

}  // namespace adelic
