#include "doctest.h"

#include "adelic/errors.hpp"
#include "adelic/heat_kernel.hpp"
#include "adelic/markov.hpp"
#include "adelic/stats.hpp"
#include "oracles.hpp"

using namespace adelic;

TEST_SUITE("markov") {

TEST_CASE("sampler table") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    const FiniteAdeleSampler s(k, 1.0);
    const auto& p = s.shell_probabilities();
    CHECK(p.size() == static_cast<std::size_t>(s.window().hi - s.window().lo + 1));
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p[i] >= 0.0);
        total += p[i];
        CHECK(p[i] == doctest::Approx(oracle::shell_mass(*f, 1.0, s.window().lo + int(i), 1.0)).epsilon(1e-9));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.window().lower_tail_bound + s.window().upper_tail_bound < k.tolerance());
}

TEST_CASE("shell frequencies at a million draws") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    const FiniteAdeleSampler s(k, 1.0);
    const ShellFit fit = shell_fit(s, 1000000, 99);
    // expected counts from the test-side shell masses, not the sampler table
    std::vector<double> expected;
    for (int m = s.window().lo; m <= s.window().hi; ++m) expected.push_back(1e6 * oracle::shell_mass(*f, 1.0, m, 1.0));
    CHECK(chi_squared_gof(fit.observed, expected).p_value > 0.001);
    CHECK(fit.total_variation < 0.005);
}

TEST_CASE("empirical ball probabilities against the CDF") {
    const auto f = Filtration::lcm();
    const HeatKernelFin k(f, 2.0);
    const FiniteAdeleSampler s(k, 0.3);
    RandomStream rng(5);
    constexpr int draws = 200000;
    std::vector<int> idx(draws);
    for (auto& m : idx) m = s.sample_norm_index(rng);
    for (int kk = -3; kk <= 3; ++kk) {
        const double p = k.radial_cdf(kk, 0.3).value;
        const double hits = static_cast<double>(std::count_if(idx.begin(), idx.end(), [&](int m) { return m <= kk; }));
        CHECK(std::abs(hits / draws - p) <= 3.0 * std::sqrt(p * (1 - p) / draws) + 1e-12);
    }
}

TEST_CASE("determinism and worker independence") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    const FiniteAdeleSampler s(k, 0.5);
    RandomStream a(7), b(7);
    for (int i = 0; i < 1000; ++i) CHECK(s.sample_increment(a) == s.sample_increment(b));
    CHECK(shell_counts(s, 50000, 3, 1) == shell_counts(s, 50000, 3, 4));
}

TEST_CASE("increments carry the declared depth") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    const FiniteAdeleSampler s(k, 1.0, 10);
    RandomStream rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto x = s.sample_increment(rng);
        CHECK(x.truncation() - *x.order() == 11);
    }
}

TEST_CASE("two steps against one step") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    const PathSimulator one(k, {0.0, 1.0});
    const PathSimulator two(k, {0.0, 0.4, 1.0});
    constexpr std::size_t paths = 200000;
    std::map<int, std::pair<double, double>> table;
    RandomStream r1(10), r2(11);
    for (std::size_t p = 0; p < paths; ++p) {
        RandomStream a = r1.split(p), b = r2.split(p);
        table[norm_index_or_zero(one.run(a).states.back())].first += 1.0;
        table[norm_index_or_zero(two.run(b).states.back())].second += 1.0;
    }
    std::vector<double> x, y;
    for (const auto& [m, c] : table) {
        x.push_back(c.first);
        y.push_back(c.second);
    }
    CHECK(chi_squared_homogeneity(x, y).p_value > 0.001);
}

TEST_CASE("exit probability by one step") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    for (double t : {0.05, 0.5}) {
        const FiniteAdeleSampler s(k, t);
        RandomStream rng(21);
        constexpr int draws = 200000;
        for (int ball = -1; ball <= 1; ++ball) {
            int exits = 0;
            for (int i = 0; i < draws; ++i) exits += s.sample_norm_index(rng) > ball;
            const double bound = k.exit_bound(ball, t);
            CHECK(double(exits) / draws <= bound + 3.0 * std::sqrt(bound * (1 - bound) / draws));
        }
    }
}

TEST_CASE("translation homogeneity") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    const std::vector<double> times{0.0, 0.3, 0.9, 1.5};
    const PathSimulator sim(k, times);
    const auto x0 = FiniteAdele::from_rational(f, Rational(7, 6), 30);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RandomStream a(seed), b(seed);
        const auto from0 = sim.run(a);
        const auto fromx = sim.run(b, x0);
        for (std::size_t i = 0; i < times.size(); ++i) CHECK(fromx.states[i] - x0 == from0.states[i].with_truncation(fromx.states[i].truncation()));
    }
}

TEST_CASE("norm trace only moves on large jumps") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(0.05 * i);
    const PathSimulator sim(k, times);
    RandomStream rng(8);
    for (int p = 0; p < 50; ++p) {
        const auto path = sim.run(rng);
        for (std::size_t i = 1; i < times.size(); ++i) {
            const auto& prev = path.states[i - 1];
            const auto jump = path.states[i] - prev;
            if (prev.is_zero() || jump.is_zero()) continue;
            // a jump smaller than the current norm leaves the norm unchanged
            if (jump.norm() < prev.norm()) CHECK(path.states[i].norm() == prev.norm());
        }
    }
}

TEST_CASE("path output and errors") {
    const auto f = Filtration::factorial();
    const HeatKernelFin k(f, 1.0);
    CHECK_THROWS_AS(PathSimulator(k, {0.0, 1.0, 0.5}), UsageError);
    CHECK_THROWS_AS(PathSimulator(k, {-1.0, 1.0}), UsageError);
    RandomStream rng(2);
    const auto path = simulate_path(k, {0.0, 1.0}, rng);
    const std::string csv = path_csv(path);
    CHECK(csv.rfind("t,norm_index,norm,gamma,digits_prefix\n0,,0,inf,\n1,", 0) == 0);
    // a window too narrow for the requested tolerance fails at construction
    const HeatKernelFin narrow(Filtration::factorial({-6, 6}), 1.0, 1e-12);
    CHECK_THROWS_AS(FiniteAdeleSampler(narrow, 1e-3), PrecisionError);
}

}
