#include "adelic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "adelic/adelic_kernel.hpp"
#include "adelic/errors.hpp"
#include "adelic/markov.hpp"
#include "adelic/schwartz.hpp"
#include "adelic/stable.hpp"
#include "adelic/stats.hpp"

namespace adelic {

namespace {

const std::vector<double> alpha_grid{0.5, 1.0, 2.0};
const std::vector<double> normalization_times{0.01, 0.1, 1.0, 10.0};

std::vector<FiltrationPtr> filtrations(const RunConfig& cfg) {
    if (cfg.filtration_given) return {build_filtration(cfg.filtration)};
    return {Filtration::factorial(), Filtration::prime_power(2), Filtration::lcm()};
}

CheckResult make(const std::string& name, double measured, double tolerance, bool passed,
                 nlohmann::json detail = nlohmann::json::object()) {
    return {name, measured, tolerance, passed, std::move(detail)};
}

CheckResult check_normalization(const RunConfig& cfg) {
    double worst = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& f : filtrations(cfg)) {
        for (double a : alpha_grid) {
            const HeatKernelFin k(f, a, cfg.tolerance);
            for (double t : normalization_times) {
                const MassReport r = k.mass_report(t);
                worst = std::max(worst, r.deviation);
                rows.push_back({{"filtration", f->name()}, {"alpha", a}, {"report", to_json(r)}});
            }
        }
    }
    return make("normalization", worst, 1e-10, worst <= 1e-10, rows);
}

CheckResult check_series_oracle(const RunConfig& cfg) {
    double worst = 0.0;
    for (const auto& f : filtrations(cfg)) {
        for (double a : alpha_grid) {
            const HeatKernelFin k(f, a, cfg.tolerance);
            for (int m = -10; m < 10; ++m) {
                for (int j = 0; j < 10; ++j) {
                    const double t = std::pow(10.0, -2.0 + 4.0 * j / 9.0);
                    const double z = k.kernel_radial(m, t).value;
                    const double oracle = sphere_decomposition_kernel(k, m, t);
                    worst = std::max(worst, std::abs(z - oracle) / std::max(1.0, std::abs(oracle)));
                }
            }
        }
    }
    return make("series_oracle", worst, 1e-10, worst <= 1e-10);
}

CheckResult check_bounds(const RunConfig& cfg) {
    std::size_t violations = 0;
    std::size_t points = 0;
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : filtrations(cfg)) {
        for (double a : alpha_grid) {
            const HeatKernelFin k(f, a, cfg.tolerance);
            for (double t : normalization_times) {
                for (int m = -10; m <= 10; ++m) {
                    const BoundReport r = k.pointwise_bound_check(m, t);
                    const double tail = k.radial_tail(m, t).value;
                    const bool exit_ok = tail <= k.exit_bound(m, t);
                    ++points;
                    if (!(r.lower_ok && r.upper_ok && exit_ok)) {
                        ++violations;
                        if (failures.size() < 20) {
                            failures.push_back({{"filtration", f->name()}, {"alpha", a},
                                                {"bound", to_json(r)}, {"exit_ok", exit_ok}});
                        }
                    }
                }
            }
        }
    }
    return make("bounds", static_cast<double>(violations), 0.0, violations == 0,
                {{"points", points}, {"failures", failures}});
}

CheckResult check_tail(const RunConfig& cfg) {
    double worst = 0.0;
    bool ok = true;
    for (const auto& f : filtrations(cfg)) {
        for (double a : alpha_grid) {
            const HeatKernelFin k(f, a, cfg.tolerance);
            for (double t : normalization_times) {
                const MassReport r = k.mass_report(t);
                ok = ok && r.lower_tail <= r.window.lower_tail_bound &&
                     r.upper_tail <= r.window.upper_tail_bound;
                worst = std::max(worst, r.series_remainder);
            }
        }
    }
    return make("tail", worst, cfg.tolerance, ok && worst <= cfg.tolerance);
}

CheckResult check_chapman_kolmogorov(const RunConfig& cfg) {
    double worst = 0.0;
    for (const auto& f : filtrations(cfg)) {
        for (double a : alpha_grid) {
            const HeatKernelFin k(f, a, cfg.tolerance);
            for (double t : {0.1, 1.0}) {
                for (double s : {0.1, 1.0}) {
                    const KernelView zt = k.at(t);
                    const KernelView zs = k.at(s);
                    for (int m = -6; m <= 6; ++m) {
                        const Certified c = radial_convolution(zt, zs, m);
                        const double direct = k.kernel_radial(m, t + s).value;
                        worst = std::max(worst, std::abs(direct - c.value) + c.remainder);
                    }
                }
            }
        }
    }
    return make("chapman_kolmogorov", worst, 1e-8, worst < 1e-8);
}

CheckResult check_eigenpair(const RunConfig& cfg) {
    double worst = 0.0;
    for (const auto& f : filtrations(cfg)) {
        for (double a : alpha_grid) {
            for (double t : {0.1, 1.0, 10.0}) {
                for (int n = -5; n <= 5; ++n) {
                    const EigenpairError e = eigenpair_fft_error(f, n, a, t);
                    // Subnormal results carry an absolute rounding of denorm_min.
                    const double floor = 16.0 * e.dimension * std::numeric_limits<double>::denorm_min();
                    const double excess = std::max(0.0, e.max_abs - floor);
                    const double rel = e.max_expected > 0.0 ? excess / e.max_expected : excess;
                    worst = std::max(worst, rel);
                }
            }
        }
    }
    return make("eigenpair", worst, 1e-12, worst < 1e-12);
}

CheckResult check_parseval(const RunConfig& cfg) {
    RandomStream rng(cfg.seed.value_or(7));
    double worst = 0.0;
    std::size_t spaces = 0;
    for (const auto& f : filtrations(cfg)) {
        for (int k = -2; k <= 4; ++k) {
            for (int l = k - 1; l >= -5; --l) {
                std::size_t dim = 0;
                try {
                    dim = TestFunction::dimension(*f, k, l);
                } catch (const ResourceError&) {
                    break;
                }
                if (dim > 720) break;
                if ((k - l) % 2 != 0) continue;  // a spread of spaces is enough
                ++spaces;
                auto random_tf = [&] {
                    std::vector<Complex> c(dim);
                    for (auto& v : c) v = Complex(rng.normal(), rng.normal());
                    return TestFunction(f, k, l, std::move(c));
                };
                const TestFunction phi = random_tf();
                const TestFunction psi = random_tf();
                const Complex lhs = inner_product(phi, psi);
                const Complex rhs = inner_product(fourier(phi), fourier(psi));
                const double scale = std::sqrt(std::abs(inner_product(phi, phi)) *
                                               std::abs(inner_product(psi, psi)));
                worst = std::max(worst, std::abs(lhs - rhs) / scale);
                const TestFunction back = inverse_fourier(fourier(phi));
                double inv = 0.0, norm = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    inv = std::max(inv, std::abs(back.coefficients()[i] - phi.coefficients()[i]));
                    norm = std::max(norm, std::abs(phi.coefficients()[i]));
                }
                worst = std::max(worst, inv / norm);
            }
        }
    }
    return make("parseval", worst, 1e-12, worst <= 1e-12, {{"spaces", spaces}});
}

CheckResult check_padic_oracle(const RunConfig& cfg) {
    const auto f = Filtration::prime_power(2);
    double worst = 0.0;
    const std::vector<double> alphas_here = cfg.filtration_given ? std::vector<double>{cfg.alpha} : alpha_grid;
    for (double a : alphas_here) {
        const HeatKernelFin k(f, a, cfg.tolerance);
        for (int m = -5; m < 5; ++m) {
            for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
                const double z = k.kernel_radial(m, t).value;
                const double oracle = padic_kernel_bruteforce(2, a, m, t);
                worst = std::max(worst, std::abs(z - oracle) / std::max(1.0, std::abs(oracle)));
            }
        }
    }
    return make("padic_oracle", worst, 1e-12, worst <= 1e-12);
}

CheckResult check_semigroup(const RunConfig& cfg) {
    RandomStream rng(cfg.seed.value_or(11));
    double worst = 0.0;
    for (const auto& f : filtrations(cfg)) {
        const HeatKernelFin k(f, cfg.alpha, cfg.tolerance);
        std::map<int, Complex> coeffs;
        while (coeffs.size() < 5) {
            coeffs[static_cast<int>(rng.uniform_int(0, 8)) - 4] = Complex(rng.normal(), 0.0);
        }
        const RadialProfile profile(f, coeffs);
        for (double t : cfg.t_grid) {
            worst = std::max(worst, semigroup_vs_convolution(k, profile, t).max_abs_discrepancy);
        }
    }
    return make("semigroup", worst, 1e-8, worst < 1e-8);
}

CheckResult check_markov_conditions(const RunConfig& cfg) {
    bool ok = true;
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& f : filtrations(cfg)) {
        const HeatKernelFin k(f, cfg.alpha, cfg.tolerance);
        const auto r = markov_conditions_report(k, {1e-4, 1e-3, 1e-2, 1e-1, 1.0},
                                                {-2, -1, 0, 1, 2, 3, 4, 5, 6}, cfg.ball_index);
        ok = ok && r.at("all_ok").get<bool>();
        reports.push_back(r);
    }
    return make("markov_conditions", ok ? 0.0 : 1.0, 0.0, ok, reports);
}

CheckResult check_monte_carlo(const RunConfig& cfg) {
    const auto f = cfg.filtration_given ? build_filtration(cfg.filtration) : Filtration::factorial();
    const HeatKernelFin k(f, cfg.filtration_given ? cfg.alpha : 1.0, cfg.tolerance);
    const FiniteAdeleSampler sampler(k, 1.0, cfg.depth);
    const ShellFit fit = shell_fit(sampler, 1000000, cfg.seed.value_or(2024), cfg.workers);
    const bool ok = fit.chi2.p_value > 0.001 && fit.total_variation < 0.005;
    return make("monte_carlo", fit.total_variation, 0.005, ok, to_json(fit, sampler.window()));
}

CheckResult check_stable(const RunConfig& cfg) {
    double closed_vs_quad = 0.0;
    double norm_dev = 0.0;
    std::size_t bound_violations = 0;
    nlohmann::json constants = nlohmann::json::object();
    for (double b : {0.5, 1.0, 1.5, 2.0}) {
        const StableKernel k(b);
        if (b == 1.0 || b == 2.0) {
            for (double t : {0.1, 1.0, 10.0}) {
                for (double x = -5.0; x <= 5.0; x += 0.25) {
                    closed_vs_quad = std::max(closed_vs_quad, std::abs(k.eval(x, t).value - k.quadrature(x, t).value));
                }
            }
        }
        norm_dev = std::max(norm_dev, std::abs(k.normalization(1.0).value - 1.0));
        double u_max = 0.0;
        for (double x : cfg.x_grid) {
            for (double t : cfg.t_grid) u_max = std::max(u_max, std::abs(x) * std::pow(t, -1.0 / b));
        }
        const double c = k.fitted_constant(std::max(u_max, 1.0));
        constants[std::to_string(b)] = c;
        for (double x : cfg.x_grid) {
            for (double t : cfg.t_grid) {
                if (k.eval(x, t).value > c * StableKernel::bound_shape(b, x, t)) ++bound_violations;
            }
        }
    }
    const bool ok = closed_vs_quad < 1e-8 && norm_dev < 1e-6 && bound_violations == 0;
    return make("stable", closed_vs_quad, 1e-8, ok,
                {{"normalization_deviation", norm_dev},
                 {"bound_violations", bound_violations},
                 {"fitted_constants", constants}});
}

CheckResult check_adelic_normalization(const RunConfig& cfg) {
    double worst = 0.0;
    bool ok = true;
    for (const auto& f : filtrations(cfg)) {
        for (double b : {0.5, 1.0, 1.5, 2.0}) {
            const AdelicKernel k(HeatKernelFin(f, cfg.alpha, cfg.tolerance), StableKernel(b));
            for (double t : cfg.t_grid) {
                const ProductNormalization n = k.normalization(t);
                const double dev = std::abs(n.total - 1.0);
                worst = std::max(worst, dev);
                ok = ok && dev <= std::max(n.combined_error, 1e-10);
            }
        }
    }
    return make("adelic_normalization", worst, 1e-6, ok && worst < 1e-6);
}

CheckResult check_dirac_limit(const RunConfig& cfg) {
    bool ok = true;
    nlohmann::json reports = nlohmann::json::array();
    std::vector<double> ts;
    for (int j = 0; j <= 6; ++j) ts.push_back(std::pow(10.0, -j));
    for (const auto& f : filtrations(cfg)) {
        for (double a : alpha_grid) {
            const AdelicKernel k(HeatKernelFin(f, a, cfg.tolerance), StableKernel(cfg.beta));
            const auto r = dirac_limit_report(k, {{-cfg.half_width, cfg.half_width, 1.0}},
                                              cfg.ball_index, ts);
            ok = ok && r.at("finite_bound_ok").get<bool>() &&
                 r.at("finite_deviation_monotone").get<bool>();
            reports.push_back(r);
        }
    }
    return make("dirac_limit", ok ? 0.0 : 1.0, 0.0, ok, reports);
}

// Variance, quantiles and a binned goodness of fit for the real sampler.
CheckResult check_stable_sampler(const RunConfig& cfg) {
    constexpr std::size_t draws = 1000000;
    const double pi = std::acos(-1.0);
    const double t = 1.0;
    RandomStream root(cfg.seed.value_or(31));
    nlohmann::json detail = nlohmann::json::object();
    bool ok = true;
    double worst_rel = 0.0;
    auto draw = [&](const StableKernel& k, std::uint64_t stream) {
        RandomStream rng = root.split(stream);
        std::vector<double> xs(draws);
        for (auto& x : xs) x = k.sample(t, rng);
        return xs;
    };
    auto quantile = [](std::vector<double> xs, double q) {
        const auto pos = static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1));
        std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(pos), xs.end());
        return xs[pos];
    };
    std::uint64_t stream = 0;
    for (double b : {0.5, 1.0, 1.5, 2.0}) {
        const StableKernel k(b);
        const std::vector<double> xs = draw(k, stream++);
        const std::vector<double> ys = draw(k, stream++);
        nlohmann::json row = nlohmann::json::object();
        if (b == 2.0) {
            double sum2 = 0.0;
            for (double x : xs) sum2 += x * x;
            const double var = sum2 / draws;
            const double target = t / (2.0 * pi * pi);
            const double rel = std::abs(var / target - 1.0);
            worst_rel = std::max(worst_rel, rel);
            ok = ok && rel < 0.01;
            row["variance"] = var;
            row["variance_target"] = target;
        }
        if (b == 1.0) {
            const double scale = t / (2.0 * pi);
            const double median = quantile(xs, 0.5);
            const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
            // Sample median of a Cauchy law has standard error pi * scale / (2 sqrt(n)).
            const double median_se = pi * scale / (2.0 * std::sqrt(double(draws)));
            const double rel = std::abs(iqr / (2.0 * scale) - 1.0);
            worst_rel = std::max(worst_rel, rel);
            ok = ok && std::abs(median) < 3.0 * median_se && rel < 0.02;
            row["median"] = median;
            row["iqr"] = iqr;
            row["iqr_target"] = 2.0 * scale;
        }
        // Bins at quantile-like edges of the exact law, open ends at both sides.
        const double spread = std::pow(t, 1.0 / b) / (2.0 * pi);
        std::vector<double> edges;
        for (int i = -20; i <= 20; ++i) edges.push_back(spread * std::sinh(0.15 * i) * 2.0);
        std::vector<double> expected(edges.size() + 1), observed(edges.size() + 1, 0.0),
            mirrored(edges.size() + 1, 0.0);
        double prev = 0.0;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const double c = real_cdf(k, edges[i], t);
            expected[i] = (c - prev) * draws;
            prev = c;
        }
        expected.back() = (1.0 - prev) * draws;
        auto bin = [&](double x) {
            return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
        };
        for (double x : xs) observed[bin(x)] += 1.0;
        for (double y : ys) mirrored[bin(-y)] += 1.0;
        const ChiSquaredResult fit = chi_squared_gof(observed, expected);
        const ChiSquaredResult sym = chi_squared_homogeneity(observed, mirrored);
        ok = ok && fit.p_value > 0.001 && sym.p_value > 0.001;
        row["fit"] = to_json(fit);
        row["symmetry"] = to_json(sym);
        detail[std::to_string(b)] = row;
    }
    return make("stable_sampler", worst_rel, 0.01, ok, detail);
}

// Marginal at t = 1 reached in one step and in two steps of 0.5, on A.
CheckResult check_adelic_paths(const RunConfig& cfg) {
    constexpr std::size_t paths = 100000;
    const auto f = cfg.filtration_given ? build_filtration(cfg.filtration) : Filtration::factorial();
    const AdelicKernel k(HeatKernelFin(f, cfg.alpha, cfg.tolerance), StableKernel(cfg.beta));
    const std::uint64_t seed = cfg.seed.value_or(41);
    const EnsembleTrace one = adelic_ensemble(k, {0.0, 1.0}, paths, seed, cfg.workers);
    const EnsembleTrace two = adelic_ensemble(k, {0.0, 0.5, 1.0}, paths, seed + 1, cfg.workers);
    // One scalar per marginal at 3 SE (mean norm index, P(|x| <= 1/(2 pi)))
    // plus homogeneity tests on the whole histograms. Judging every cell at
    // 3 SE alone would flag a correct sampler several percent of the time.
    auto mean_gap_se = [](const std::vector<double>& u, const std::vector<double>& v) {
        auto moments = [](const std::vector<double>& w) {
            double s = 0.0, s2 = 0.0;
            for (double x : w) s += x, s2 += x * x;
            const double mean = s / static_cast<double>(w.size());
            return std::pair{mean, (s2 / static_cast<double>(w.size()) - mean * mean) / static_cast<double>(w.size())};
        };
        const auto [m1, v1] = moments(u);
        const auto [m2, v2] = moments(v);
        return std::abs(m1 - m2) / std::sqrt(v1 + v2);
    };
    const double pi = std::acos(-1.0);
    const double unit = 1.0 / (2.0 * pi);
    std::vector<double> edges;
    for (int i = -8; i <= 8; ++i) edges.push_back(unit * i * 0.5);
    auto bin = [&](double x) {
        return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
    };
    std::map<int, std::pair<double, double>> shells;
    std::vector<double> idx_one, idx_two, near_one, near_two;
    std::vector<double> real_one(edges.size() + 1, 0.0), real_two(edges.size() + 1, 0.0);
    for (std::size_t p = 0; p < paths; ++p) {
        const int m1 = one.norm_index[p * 2 + 1], m2 = two.norm_index[p * 3 + 2];
        shells[m1].first += 1.0;
        shells[m2].second += 1.0;
        if (m1 != zero_index) idx_one.push_back(m1);
        if (m2 != zero_index) idx_two.push_back(m2);
        const double x1 = one.real[p * 2 + 1], x2 = two.real[p * 3 + 2];
        near_one.push_back(std::abs(x1) <= unit ? 1.0 : 0.0);
        near_two.push_back(std::abs(x2) <= unit ? 1.0 : 0.0);
        real_one[bin(x1)] += 1.0;
        real_two[bin(x2)] += 1.0;
    }
    std::vector<double> shell_one, shell_two;
    nlohmann::json table = nlohmann::json::array();
    for (const auto& [m, c] : shells) {
        shell_one.push_back(c.first);
        shell_two.push_back(c.second);
        table.push_back({{"norm_index", m == zero_index ? nlohmann::json(nullptr) : nlohmann::json(m)},
                         {"one_step", c.first},
                         {"two_step", c.second}});
    }
    const double finite_se = mean_gap_se(idx_one, idx_two);
    const double real_se = mean_gap_se(near_one, near_two);
    const ChiSquaredResult shell_h = chi_squared_homogeneity(shell_one, shell_two);
    const ChiSquaredResult real_h = chi_squared_homogeneity(real_one, real_two);
    const double worst = std::max(finite_se, real_se);
    const bool ok = worst <= 3.0 && shell_h.p_value > 0.001 && real_h.p_value > 0.001;
    return make("adelic_paths", worst, 3.0, ok,
                {{"paths", paths},
                 {"finite_mean_se", finite_se},
                 {"real_mass_se", real_se},
                 {"shell_homogeneity", to_json(shell_h)},
                 {"real_homogeneity", to_json(real_h)},
                 {"shells", table}});
}

using CheckFn = std::function<CheckResult(const RunConfig&)>;

const std::vector<std::pair<std::string, CheckFn>>& registry() {
    static const std::vector<std::pair<std::string, CheckFn>> r{
        {"normalization", check_normalization},
        {"series_oracle", check_series_oracle},
        {"bounds", check_bounds},
        {"tail", check_tail},
        {"chapman_kolmogorov", check_chapman_kolmogorov},
        {"eigenpair", check_eigenpair},
        {"parseval", check_parseval},
        {"padic_oracle", check_padic_oracle},
        {"semigroup", check_semigroup},
        {"markov_conditions", check_markov_conditions},
        {"monte_carlo", check_monte_carlo},
        {"stable", check_stable},
        {"stable_sampler", check_stable_sampler},
        {"adelic_normalization", check_adelic_normalization},
        {"adelic_paths", check_adelic_paths},
        {"dirac_limit", check_dirac_limit},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& verification_checks() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

CheckResult run_check(const std::string& name, const RunConfig& cfg) {
    for (const auto& [n, fn] : registry()) {
        if (n == name) return fn(cfg);
    }
    throw UsageError("unknown check '" + name + "'");
}

nlohmann::json run_verification(const RunConfig& cfg) {
    validate(cfg);
    const auto& names = cfg.checks.empty() ? verification_checks() : cfg.checks;
    for (const auto& n : names) {
        if (std::find(verification_checks().begin(), verification_checks().end(), n) ==
            verification_checks().end()) {
            throw UsageError("unknown check '" + n + "'");
        }
    }
    nlohmann::json checks = nlohmann::json::array();
    bool passed = true;
    for (const auto& n : names) {
        const CheckResult r = run_check(n, cfg);
        passed = passed && r.passed;
        checks.push_back(to_json(r));
    }
    return {{"schema_version", 1}, {"checks", checks}, {"passed", passed}};
}

nlohmann::json to_json(const CheckResult& r) {
    return {{"name", r.name},
            {"measured", r.measured},
            {"tolerance", r.tolerance},
            {"passed", r.passed},
            {"detail", r.detail}};
}

double padic_kernel_bruteforce(unsigned p, double alpha, int m, double t) {
    // int_{|xi| = p^k} chi(xi x) dxi for |x| = p^m:
    //   p^k (1 - 1/p) if k + m <= 0, -p^{k-1} if k + m = 1, 0 beyond.
    const double dp = static_cast<double>(p);
    double sum = 0.0;
    for (int k = -400; k <= 1 - m; ++k) {
        const double weight = std::exp(-t * std::pow(dp, alpha * k));
        const double sphere = k + m <= 0 ? std::pow(dp, k) * (1.0 - 1.0 / dp) : -std::pow(dp, k - 1);
        sum += weight * sphere;
    }
    return sum;
}

double sphere_decomposition_kernel(const HeatKernelFin& kernel, int m, double t) {
    const auto& f = *kernel.filtration();
    double sum = 0.0;
    for (int n = kernel.series_window().lo; n <= 1 - m; ++n) {
        const double e = std::exp(-t * std::exp(kernel.alpha() * f.log_psi(n)));
        if (e == 0.0) continue;
        sum += e * char_integral_sphere(f, n, std::optional<int>(m)).convert_to<double>();
    }
    return sum;
}

EigenpairError eigenpair_fft_error(const FiltrationPtr& f, int n, double alpha, double t) {
    // 1_{S_n} lives in D_n^{n-1}; one extra level on each side keeps
    // neighbouring spheres in view.
    TestFunction spectral = TestFunction::zero(f, n + 1, n - 2);
    const double factor = std::exp(-t * eigenvalue(*f, n, alpha));
    for (std::size_t a = 0; a < spectral.dimension(); ++a) {
        const FiniteAdele xi = spectral.representative(a);
        if (!xi.is_zero() && xi.norm_index() == n) spectral.coefficients()[a] = factor;
    }
    const TestFunction physical = inverse_fourier(spectral);
    EigenpairError e;
    e.dimension = physical.dimension();
    for (std::size_t b = 0; b < physical.dimension(); ++b) {
        const FiniteAdele x = physical.representative(b);
        const double expected = factor * eigenfunction_eval(*f, n, x);
        e.max_abs = std::max(e.max_abs, std::abs(physical.coefficients()[b] - expected));
        e.max_expected = std::max(e.max_expected, std::abs(expected));
    }
    return e;
}

}  // namespace adelic
