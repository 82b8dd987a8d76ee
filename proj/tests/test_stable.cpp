#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"

#include "adelic/adelic_kernel.hpp"
#include "adelic/errors.hpp"
#include "adelic/stable.hpp"
#include "adelic/stats.hpp"

using namespace adelic;

namespace {

const double pi = std::acos(-1.0);

// 2 int_0^inf exp(-t xi^beta) cos(2 pi xi x) d xi on half-period cells up to
// where the integrand is below 1e-18.
double fourier_integral(double beta, double x, double t) {
    const double cutoff = std::pow(std::log(1e18) / t, 1.0 / beta);
    double sum = 0.0;
    const double step = std::min(cutoff / 64.0, x > 0.0 ? 0.5 / std::abs(x) : cutoff);
    const auto integrand = [&](double xi) { return std::exp(-t * std::pow(xi, beta)) * std::cos(2 * pi * xi * x); };
    const auto cell = [&](double a, double b) {
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 5, 1e-14);
    };
    // xi^beta is not smooth at 0, so the first cell is cut geometrically
    for (int k = 0; k < 60; ++k) sum += cell(std::ldexp(step, -k - 1), std::ldexp(step, -k));
    for (double a = step; a < cutoff; a += step) sum += cell(a, std::min(a + step, cutoff));
    return 2.0 * sum;
}

}  // namespace

TEST_SUITE("stable") {

TEST_CASE("closed forms") {
    const StableKernel gauss(2.0), cauchy(1.0);
    for (double t : {0.1, 1.0, 5.0}) {
        CHECK(cauchy.eval(0.0, t).value == doctest::Approx(2.0 / t).epsilon(1e-15));
        for (double x : {-3.0, -0.4, 0.0, 0.1, 2.0}) {
            CHECK(gauss.eval(x, t).value == doctest::Approx(std::sqrt(pi / t) * std::exp(-pi * pi * x * x / t)).epsilon(1e-14));
            CHECK(cauchy.eval(x, t).value == doctest::Approx(2 * t / (t * t + 4 * pi * pi * x * x)).epsilon(1e-14));
        }
    }
}

TEST_CASE("quadrature against closed forms and a plain integral") {
    for (double beta : {1.0, 2.0}) {
        const StableKernel k(beta);
        for (double t : {0.1, 1.0, 10.0}) {
            for (double x = -6.0; x <= 6.0; x += 0.5) {
                CHECK(std::abs(k.quadrature(x, t).value - k.eval(x, t).value) < 1e-8);
            }
        }
    }
    for (double beta : {0.5, 0.8, 1.5, 1.9}) {
        const StableKernel k(beta);
        for (double t : {0.5, 1.0, 3.0}) {
            for (double x : {0.0, 0.05, 0.3, 1.0}) {
                CHECK(std::abs(k.eval(x, t).value - fourier_integral(beta, x, t)) < 1e-8);
            }
        }
    }
}

TEST_CASE("self-similarity") {
    for (double beta : {0.5, 1.5}) {
        const StableKernel k(beta);
        for (double t : {0.2, 4.0}) {
            for (double x : {0.0, 0.3, 2.5}) {
                const double scaled = std::pow(t, -1.0 / beta) * k.eval(std::pow(t, -1.0 / beta) * x, 1.0).value;
                CHECK(k.eval(x, t).value == doctest::Approx(scaled).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("normalization and positivity") {
    for (double beta : {0.5, 1.0, 1.5, 2.0}) {
        const StableKernel k(beta);
        for (double t : {0.1, 1.0, 10.0}) CHECK(std::abs(k.normalization(t).value - 1.0) < 1e-6);
        for (double x = 0.0; x < 20.0; x += 0.7) CHECK(k.eval(x, 1.0).value >= 0.0);
    }
}

TEST_CASE("semigroup by numeric convolution") {
    for (double beta : {0.5, 1.0, 1.5, 2.0}) {
        const StableKernel k(beta);
        for (double x : {0.0, 0.2, 1.0}) {
            CHECK(std::abs(k.convolution(x, 0.4, 0.6).value - k.eval(x, 1.0).value) < 1e-5);
        }
    }
}

TEST_CASE("bound with the fitted constant") {
    for (double beta : {0.5, 1.0, 1.5, 2.0}) {
        const StableKernel k(beta);
        std::vector<double> xs, ts{0.01, 0.1, 1.0, 10.0};
        for (double x = -10.0; x <= 10.0; x += 0.25) xs.push_back(x);
        double u_max = 1.0;
        for (double x : xs)
            for (double t : ts) u_max = std::max(u_max, std::abs(x) * std::pow(t, -1.0 / beta));
        const double c = k.fitted_constant(u_max);
        CHECK(std::isfinite(c));
        for (double x : xs)
            for (double t : ts) CHECK(k.eval(x, t).value <= c * StableKernel::bound_shape(beta, x, t));
    }
    // the Cauchy kernel meets the bound with C = 2 exactly at the origin
    CHECK(StableKernel(1.0).fitted_constant(50.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sampler moments and quantiles") {
    constexpr int draws = 1000000;
    const double t = 0.7;
    RandomStream rng(55);
    std::vector<double> xs(draws);
    const StableKernel gauss(2.0);
    double sq = 0.0;
    for (auto& x : xs) {
        x = gauss.sample(t, rng);
        sq += x * x;
    }
    CHECK(std::abs(sq / draws / (t / (2 * pi * pi)) - 1.0) < 0.01);

    const StableKernel cauchy(1.0);
    for (auto& x : xs) x = cauchy.sample(t, rng);
    std::sort(xs.begin(), xs.end());
    const double scale = t / (2 * pi);
    CHECK(std::abs(xs[draws / 2]) < 3.0 * pi * scale / (2.0 * std::sqrt(double(draws))));
    const double iqr = xs[3 * draws / 4] - xs[draws / 4];
    CHECK(std::abs(iqr / (2 * scale) - 1.0) < 0.02);
}

TEST_CASE("sampler fits the density and is symmetric") {
    for (double beta : {0.5, 1.5}) {
        const StableKernel k(beta);
        const double t = 1.0;
        RandomStream rng(beta == 0.5 ? 1 : 2);
        std::vector<double> edges;
        for (int i = -12; i <= 12; ++i) edges.push_back(0.05 * i);
        std::vector<double> expected(edges.size() + 1), obs(edges.size() + 1), mirror(edges.size() + 1);
        double prev = 0.0;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const double c = real_cdf(k, edges[i], t);
            expected[i] = (c - prev) * 200000;
            prev = c;
        }
        expected.back() = (1.0 - prev) * 200000;
        auto bin = [&](double x) { return std::upper_bound(edges.begin(), edges.end(), x) - edges.begin(); };
        for (int i = 0; i < 200000; ++i) obs[bin(k.sample(t, rng))] += 1.0;
        for (int i = 0; i < 200000; ++i) mirror[bin(-k.sample(t, rng))] += 1.0;
        CHECK(chi_squared_gof(obs, expected).p_value > 0.001);
        CHECK(chi_squared_homogeneity(obs, mirror).p_value > 0.001);
    }
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(StableKernel(0.0), UsageError);
    CHECK_THROWS_AS(StableKernel(2.5), UsageError);
    CHECK_THROWS_AS(StableKernel(1.5).eval(0.0, 0.0), UsageError);
}

}
