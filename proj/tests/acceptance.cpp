// Release gate: one PASS/FAIL line per acceptance criterion, exit status 1 if
// any of them fails. Reference values come from tests/oracles.hpp or from
// closed forms written out here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "adelic/adelic_kernel.hpp"
#include "adelic/errors.hpp"
#include "adelic/heat_kernel.hpp"
#include "adelic/markov.hpp"
#include "adelic/schwartz.hpp"
#include "adelic/stable.hpp"
#include "adelic/stats.hpp"

#include "oracles.hpp"

using namespace adelic;

namespace {

const double pi = std::acos(-1.0);
const std::vector<double> alphas{0.5, 1.0, 2.0};
const std::vector<double> betas{0.5, 1.0, 1.5, 2.0};

std::vector<FiltrationPtr> builtins() {
    return {Filtration::factorial(), Filtration::prime_power(2), Filtration::lcm()};
}

struct Outcome {
    bool passed = false;
    std::string summary;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

double uniform_bound(double alpha, double t) { return std::tgamma(1.0 / alpha + 1.0) * std::pow(t, -1.0 / alpha); }

double pointwise_bound(const Filtration& f, double alpha, int m, double t) {
    return f.psi_double(-m) * -std::expm1(-t * std::exp(alpha * f.log_psi(1 - m)));
}

double exit_bound(const Filtration& f, double alpha, int k, double t) {
    return -std::expm1(-t * std::exp(alpha * f.log_psi(-k)));
}

Outcome normalization() {
    double worst = 0.0;
    for (const auto& f : builtins()) {
        for (double a : alphas) {
            const HeatKernelFin k(f, a);
            for (double t : {0.01, 0.1, 1.0, 10.0}) worst = std::max(worst, k.mass_report(t).deviation);
        }
    }
    return {worst <= 1e-10, fmt("max |mass - 1| = %.3g (tol 1e-10)", worst)};
}

Outcome series_oracle() {
    double worst = 0.0;
    for (const auto& f : builtins()) {
        for (double a : alphas) {
            const HeatKernelFin k(f, a);
            for (int m = -10; m < 10; ++m) {
                for (int j = 0; j < 10; ++j) {
                    const double t = std::pow(10.0, -2.0 + 4.0 * j / 9.0);
                    const double ref = oracle::kernel_by_spheres(*f, a, m, t);
                    worst = std::max(worst, std::abs(k.kernel_radial(m, t).value - ref) / std::max(1.0, std::abs(ref)));
                }
            }
        }
    }
    return {worst <= 1e-10, fmt("max error = %.3g relative to max(1, |Z|) (tol 1e-10)", worst)};
}

Outcome bounds() {
    std::size_t points = 0, violations = 0;
    for (const auto& f : builtins()) {
        for (double a : alphas) {
            const HeatKernelFin k(f, a);
            for (double t : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
                for (int m = -10; m <= 10; ++m) {
                    ++points;
                    const double z = k.kernel_radial(m, t).value;
                    const bool ok = z >= 0.0 && z <= uniform_bound(a, t) && z <= pointwise_bound(*f, a, m, t) &&
                                    k.radial_tail(m, t).value <= exit_bound(*f, a, m, t);
                    if (!ok) ++violations;
                }
            }
        }
    }
    return {violations == 0,
            fmt("%.0f violations over %.0f points", static_cast<double>(violations), static_cast<double>(points))};
}

Outcome chapman_kolmogorov() {
    double worst = 0.0;
    for (const auto& f : builtins()) {
        for (double a : alphas) {
            const HeatKernelFin k(f, a);
            for (double t : {0.1, 1.0}) {
                for (double s : {0.1, 1.0}) {
                    for (int m = -6; m <= 6; ++m) {
                        const Certified c = radial_convolution(k.at(t), k.at(s), m);
                        worst = std::max(worst, std::abs(k.kernel_radial(m, t + s).value - c.value) + c.remainder);
                    }
                }
            }
        }
    }
    return {worst < 1e-8, fmt("max |Z(t+s) - Z(t)*Z(s)| = %.3g (tol 1e-8)", worst)};
}

// exp(-t e^{alpha psi(n)}) 1_{S_n} pulled back by the FFT, against the
// oracle's sphere integral times the same factor.
Outcome spectral() {
    double worst = 0.0;
    for (const auto& f : builtins()) {
        for (double a : alphas) {
            for (double t : {0.1, 1.0, 10.0}) {
                for (int n = -5; n <= 5; ++n) {
                    const double factor = std::exp(-t * std::exp(a * f->log_psi(n)));
                    TestFunction spectral = TestFunction::zero(f, n + 1, n - 2);
                    for (std::size_t i = 0; i < spectral.dimension(); ++i) {
                        const FiniteAdele xi = spectral.representative(i);
                        if (!xi.is_zero() && xi.norm_index() == n) spectral.coefficients()[i] = factor;
                    }
                    const TestFunction physical = inverse_fourier(spectral);
                    double err = 0.0, scale = 0.0;
                    for (std::size_t i = 0; i < physical.dimension(); ++i) {
                        const FiniteAdele x = physical.representative(i);
                        const auto m = x.is_zero() ? std::nullopt : std::optional<int>(x.norm_index());
                        const double expected = factor * static_cast<double>(oracle::sphere_integral(*f, n, m));
                        err = std::max(err, std::abs(physical.coefficients()[i] - expected));
                        scale = std::max(scale, std::abs(expected));
                    }
                    // a subnormal factor carries an absolute rounding of denorm_min per term
                    err = std::max(0.0, err - 16.0 * physical.dimension() * std::numeric_limits<double>::denorm_min());
                    worst = std::max(worst, scale > 0.0 ? err / scale : err);
                }
            }
        }
    }
    return {worst < 1e-12, fmt("max relative error = %.3g (tol 1e-12)", worst)};
}

Outcome parseval() {
    RandomStream rng(20240601);
    double worst = 0.0;
    std::size_t spaces = 0;
    for (const auto& f : builtins()) {
        for (int k = -3; k <= 5; ++k) {
            for (int l = k - 1;; --l) {
                std::size_t dim = 0;
                try {
                    dim = TestFunction::dimension(*f, k, l);
                } catch (const ResourceError&) {
                    break;
                }
                if (dim > 720) break;
                ++spaces;
                auto draw = [&] {
                    std::vector<Complex> c(dim);
                    for (auto& v : c) v = Complex(rng.normal(), rng.normal());
                    return TestFunction(f, k, l, std::move(c));
                };
                const TestFunction phi = draw(), psi = draw();
                const Complex lhs = inner_product(phi, psi);
                const Complex rhs = inner_product(fourier(phi), fourier(psi));
                const double scale = std::sqrt(std::abs(inner_product(phi, phi)) * std::abs(inner_product(psi, psi)));
                worst = std::max(worst, std::abs(lhs - rhs) / scale);
            }
        }
    }
    return {worst <= 1e-12, fmt("max relative defect = %.3g over %.0f spaces (tol 1e-12)", worst,
                                static_cast<double>(spaces))};
}

Outcome padic_oracle() {
    const auto f = Filtration::prime_power(2);
    double worst = 0.0;
    for (double a : alphas) {
        const HeatKernelFin k(f, a);
        for (int m = -5; m < 5; ++m) {
            for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
                const double ref = oracle::vladimirov_kernel(2, a, m, t);
                worst = std::max(worst, std::abs(k.kernel_radial(m, t).value - ref) / std::max(1.0, std::abs(ref)));
            }
        }
    }
    return {worst <= 1e-12, fmt("max error = %.3g (tol 1e-12)", worst)};
}

Outcome monte_carlo() {
    constexpr std::size_t draws = 1000000;
    const auto start = std::chrono::steady_clock::now();
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    const FiniteAdeleSampler sampler(k, 1.0);
    const std::vector<double> observed = shell_counts(sampler, draws, 2718);
    std::vector<double> p;
    for (int m = sampler.window().lo; m <= sampler.window().hi; ++m) p.push_back(oracle::shell_mass(*f, 1.0, m, 1.0));
    double total = 0.0;
    for (double v : p) total += v;
    std::vector<double> expected, freq;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] /= total;
        expected.push_back(p[i] * draws);
        freq.push_back(observed[i] / draws);
    }
    const ChiSquaredResult chi2 = chi_squared_gof(observed, expected);
    const double tv = total_variation(freq, p);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {chi2.p_value > 0.001 && tv < 0.005 && seconds < 60.0,
            fmt("p = %.3g, TV = %.3g, %.1f s (need p > 0.001, TV < 0.005, < 60 s)", chi2.p_value, tv, seconds)};
}

double closed_cdf(double beta, double x, double t) {
    if (beta == 1.0) return 0.5 + std::atan(2.0 * pi * x / t) / pi;
    if (beta == 2.0) return 0.5 * std::erfc(-x * pi / std::sqrt(t));
    return std::nan("");
}

Outcome archimedean() {
    double closed_vs_quad = 0.0;
    for (double b : {1.0, 2.0}) {
        const StableKernel k(b);
        for (double t : {0.1, 1.0, 10.0}) {
            for (double x = -6.0; x <= 6.0; x += 0.25) {
                const double closed = b == 1.0 ? 2 * t / (t * t + 4 * pi * pi * x * x)
                                               : std::sqrt(pi / t) * std::exp(-pi * pi * x * x / t);
                closed_vs_quad = std::max(closed_vs_quad, std::abs(k.quadrature(x, t).value - closed));
            }
        }
    }

    constexpr std::size_t draws = 1000000;
    const double t = 1.0;
    RandomStream root(1618);
    std::uint64_t stream = 0;
    bool sampler_ok = true;
    double worst_p = 1.0, variance_rel = 0.0, iqr_rel = 0.0, median_se = 0.0;
    auto quantile = [](std::vector<double> xs, double q) {
        const auto pos = static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1));
        std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(pos), xs.end());
        return xs[pos];
    };
    for (double b : betas) {
        const StableKernel k(b);
        RandomStream rng = root.split(stream++);
        std::vector<double> xs(draws);
        for (auto& x : xs) x = k.sample(t, rng);
        if (b == 2.0) {
            double s2 = 0.0;
            for (double x : xs) s2 += x * x;
            variance_rel = std::abs(s2 / draws / (t / (2 * pi * pi)) - 1.0);
            sampler_ok = sampler_ok && variance_rel < 0.01;
        }
        if (b == 1.0) {
            const double scale = t / (2 * pi);
            median_se = std::abs(quantile(xs, 0.5)) / (pi * scale / (2.0 * std::sqrt(double(draws))));
            iqr_rel = std::abs((quantile(xs, 0.75) - quantile(xs, 0.25)) / (2 * scale) - 1.0);
            sampler_ok = sampler_ok && median_se < 3.0 && iqr_rel < 0.02;
        }
        std::vector<double> edges;
        for (int i = -20; i <= 20; ++i) edges.push_back(2.0 * std::pow(t, 1.0 / b) / (2 * pi) * std::sinh(0.15 * i));
        std::vector<double> observed(edges.size() + 1, 0.0), expected(edges.size() + 1);
        for (double x : xs) observed[std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()] += 1.0;
        double prev = 0.0;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const double c = (b == 1.0 || b == 2.0) ? closed_cdf(b, edges[i], t) : real_cdf(k, edges[i], t);
            expected[i] = (c - prev) * draws;
            prev = c;
        }
        expected.back() = (1.0 - prev) * draws;
        const double p = chi_squared_gof(observed, expected).p_value;
        worst_p = std::min(worst_p, p);
        sampler_ok = sampler_ok && p > 0.001;
    }

    std::size_t violations = 0;
    for (double b : betas) {
        const StableKernel k(b);
        std::vector<double> ts{0.01, 0.1, 1.0, 10.0}, xs;
        for (double x = -10.0; x <= 10.0; x += 0.25) xs.push_back(x);
        double u_max = 1.0;
        for (double t2 : ts) u_max = std::max(u_max, 10.0 * std::pow(t2, -1.0 / b));
        const double c = k.fitted_constant(u_max);
        for (double t2 : ts) {
            for (double x : xs) {
                if (k.eval(x, t2).value > c * std::pow(t2, 1.0 / b) / (std::pow(t2, 2.0 / b) + x * x)) ++violations;
            }
        }
    }
    const bool ok = closed_vs_quad < 1e-8 && sampler_ok && violations == 0;
    return {ok, fmt("closed vs quadrature %.3g (tol 1e-8); ", closed_vs_quad) +
                    fmt("variance rel %.3g (tol 0.01), IQR rel %.3g (tol 0.02), ", variance_rel, iqr_rel) +
                    fmt("median %.2f SE (tol 3), min GOF p %.3g; ", median_se, worst_p) +
                    fmt("%.0f bound violations", static_cast<double>(violations))};
}

Outcome adelic_product() {
    double worst_norm = 0.0;
    bool norm_ok = true;
    for (const auto& f : builtins()) {
        for (double b : betas) {
            const AdelicKernel k(HeatKernelFin(f, 1.0), StableKernel(b));
            for (double t : {0.1, 1.0, 10.0}) {
                const ProductNormalization n = k.normalization(t);
                const double dev = std::abs(n.total - 1.0);
                worst_norm = std::max(worst_norm, dev);
                norm_ok = norm_ok && dev <= std::max(n.combined_error, 1e-10);
            }
        }
    }

    constexpr std::size_t paths = 100000;
    const AdelicKernel k(HeatKernelFin(Filtration::factorial(), 1.0), StableKernel(1.5));
    const EnsembleTrace one = adelic_ensemble(k, {0.0, 1.0}, paths, 577);
    const EnsembleTrace two = adelic_ensemble(k, {0.0, 0.5, 1.0}, paths, 578);
    // One scalar per marginal, each judged at 3 SE: the mean norm index of
    // the finite part and P(|X| <= 1/(2 pi)) of the real part. Whole
    // histograms go through homogeneity tests on top.
    auto mean_gap_se = [](const std::vector<double>& u, const std::vector<double>& v) {
        auto moments = [](const std::vector<double>& w) {
            double s = 0.0, s2 = 0.0;
            for (double x : w) s += x, s2 += x * x;
            const double mean = s / w.size();
            return std::pair{mean, (s2 / w.size() - mean * mean) / w.size()};
        };
        const auto [m1, v1] = moments(u);
        const auto [m2, v2] = moments(v);
        return std::abs(m1 - m2) / std::sqrt(v1 + v2);
    };
    std::vector<double> idx_one, idx_two, near_one, near_two;
    std::map<int, std::pair<double, double>> shells;
    std::vector<double> edges;
    for (int i = -8; i <= 8; ++i) edges.push_back(i * 0.5 / (2 * pi));
    std::vector<double> real_one(edges.size() + 1, 0.0), real_two(edges.size() + 1, 0.0);
    const double unit = 1.0 / (2 * pi);
    for (std::size_t p = 0; p < paths; ++p) {
        const int m1 = one.norm_index[2 * p + 1], m2 = two.norm_index[3 * p + 2];
        shells[m1].first += 1.0;
        shells[m2].second += 1.0;
        if (m1 != zero_index) idx_one.push_back(m1);
        if (m2 != zero_index) idx_two.push_back(m2);
        const double x1 = one.real[2 * p + 1], x2 = two.real[3 * p + 2];
        near_one.push_back(std::abs(x1) <= unit);
        near_two.push_back(std::abs(x2) <= unit);
        real_one[std::upper_bound(edges.begin(), edges.end(), x1) - edges.begin()] += 1.0;
        real_two[std::upper_bound(edges.begin(), edges.end(), x2) - edges.begin()] += 1.0;
    }
    std::vector<double> shell_one, shell_two;
    for (const auto& [m, c] : shells) {
        shell_one.push_back(c.first);
        shell_two.push_back(c.second);
    }
    const double finite_se = mean_gap_se(idx_one, idx_two);
    const double real_se = mean_gap_se(near_one, near_two);
    const double p_min = std::min(chi_squared_homogeneity(shell_one, shell_two).p_value,
                                  chi_squared_homogeneity(real_one, real_two).p_value);
    const bool paths_ok = finite_se <= 3.0 && real_se <= 3.0 && p_min > 0.001;
    return {norm_ok && paths_ok,
            fmt("max |mass - 1| = %.3g, ", worst_norm) + (norm_ok ? "within" : "outside") +
                " combined error; " +
                fmt("at %.0f paths finite %.2f SE, real %.2f SE (tol 3)", static_cast<double>(paths), finite_se, real_se) +
                fmt(", min homogeneity p %.3g", p_min)};
}

Outcome dirac_limit() {
    std::vector<double> ts;
    for (int j = 0; j <= 6; ++j) ts.push_back(std::pow(10.0, -j));
    std::size_t failures = 0, cases = 0;
    for (const auto& f : builtins()) {
        for (double a : alphas) {
            const HeatKernelFin k(f, a);
            for (int l = -2; l <= 2; ++l) {
                ++cases;
                bool ok = true;
                double prev = INFINITY;
                for (double t : ts) {
                    const double dev = std::abs(k.radial_cdf(l, t).value - 1.0);
                    ok = ok && dev <= exit_bound(*f, a, l, t) && dev <= prev;
                    prev = dev;
                }
                // the same limit on A with a box around 0 on the real side
                const AdelicKernel ak(k, StableKernel(2.0));
                const auto r = dirac_limit_report(ak, {{-1.0, 1.0, 1.0}}, l, ts);
                ok = ok && r.at("finite_bound_ok").get<bool>() && r.at("finite_deviation_monotone").get<bool>();
                if (!ok) ++failures;
            }
        }
    }
    return {failures == 0,
            fmt("%.0f of %.0f (filtration, alpha, ball) cases fail", static_cast<double>(failures), static_cast<double>(cases))};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"normalization", normalization},
        {"series vs sphere oracle", series_oracle},
        {"kernel bounds", bounds},
        {"Chapman-Kolmogorov", chapman_kolmogorov},
        {"spectral identity", spectral},
        {"Parseval", parseval},
        {"p-adic oracle", padic_oracle},
        {"Monte Carlo shell law", monte_carlo},
        {"archimedean factor", archimedean},
        {"adelic product", adelic_product},
        {"Dirac limit", dirac_limit},
    };
    int failed = 0;
    int index = 1;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("criterion %2d %-26s %s  %s\n", index++, name, o.passed ? "PASS" : "FAIL", o.summary.c_str());
        std::fflush(stdout);
        if (!o.passed) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
