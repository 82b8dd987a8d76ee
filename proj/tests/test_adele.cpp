#include <numeric>

#include "doctest.h"

#include "adelic/adele.hpp"
#include "adelic/errors.hpp"
#include "adelic/random.hpp"
#include "adelic/stats.hpp"

using namespace adelic;

namespace {

FiniteAdele random_adele(const FiltrationPtr& f, RandomStream& rng, int trunc = 12) {
    const int start = static_cast<int>(rng.uniform_int(0, 10)) - 6;
    std::vector<std::uint64_t> digits;
    for (int pos = start; pos < trunc; ++pos) digits.push_back(rng.uniform_int(0, f->radix(pos) - 1));
    return FiniteAdele(f, start, digits, trunc);
}

}  // namespace

TEST_SUITE("adele") {

TEST_CASE("order and norm of embedded integers") {
    const auto f = Filtration::factorial();
    const auto six = FiniteAdele::from_integer(f, 6, 10);
    CHECK(six.order() == 2);
    CHECK(six.norm() == Rational(1, 6));
    CHECK(six.value() == 6);
    const auto zero = FiniteAdele::zero(f, 10);
    CHECK(zero.is_zero());
    CHECK(zero.norm() == 0);
    const FiniteAdele x(f, -1, {1, 0, 1}, 4);
    CHECK(x.order() == -1);
}

TEST_CASE("carry across the first radix") {
    const auto f = Filtration::factorial();
    const FiniteAdele one(f, 0, {1}, 6);
    const FiniteAdele two = one + one;
    CHECK(two.digit(0) == 0);
    CHECK(two.digit(1) == 1);
    CHECK(two.value() == 2);
    CHECK(one + FiniteAdele::zero(f, 6) == one);
}

TEST_CASE("negation cancels up to truncation") {
    const auto f = Filtration::lcm();
    RandomStream rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto x = random_adele(f, rng);
        CHECK((x + (-x)).is_zero());
    }
}

TEST_CASE("negative rationals by radix complement") {
    const auto f = Filtration::factorial();
    const auto m1 = FiniteAdele::from_integer(f, -1, 6);
    // -1 = sum of (r - 1) e^{psi(l)} over l >= 0, cut at the truncation
    for (int pos = 0; pos < 6; ++pos) CHECK(m1.digit(pos) == f->radix(pos) - 1);
    CHECK((m1 + FiniteAdele::from_integer(f, 1, 6)).is_zero());
}

TEST_CASE("fractional parts") {
    const auto f = Filtration::factorial();
    CHECK(FiniteAdele(f, -1, {1}, 3).fractional_part() == Rational(1, 2));
    CHECK(FiniteAdele(f, -2, {1, 0}, 3).fractional_part() == Rational(1, 6));
    CHECK(FiniteAdele::from_integer(f, 7, 5).fractional_part() == 0);
}

TEST_CASE("rational round trip") {
    const auto f = Filtration::factorial();
    RandomStream rng(9);
    for (int i = 0; i < 200; ++i) {
        const long long num = static_cast<long long>(rng.uniform_int(0, 2000));
        // any divisor of 720 = e^{psi(5)} is a valid denominator
        const long long den = std::gcd(static_cast<long long>(rng.uniform_int(1, 720)), 720LL);
        const Rational q(num, den);
        const auto x = FiniteAdele::from_rational(f, q, 30);
        CHECK(x.value() == q);
    }
    CHECK_THROWS_AS(FiniteAdele::from_rational(Filtration::prime_power(2), Rational(1, 3), 5), UsageError);
}

TEST_CASE("ultrametric inequality on random pairs") {
    const auto f = Filtration::factorial();
    RandomStream rng(3);
    for (int i = 0; i < 300; ++i) {
        const auto x = random_adele(f, rng);
        const auto y = random_adele(f, rng);
        const auto s = x + y;
        if (s.is_zero()) continue;
        CHECK(s.norm() <= std::max(x.norm(), y.norm()));
        if (x.norm() != y.norm()) CHECK(s.norm() == std::max(x.norm(), y.norm()));
    }
}

TEST_CASE("character values") {
    const auto f = Filtration::factorial();
    const auto xi = FiniteAdele::from_integer(f, 3, 10);
    const auto x = FiniteAdele::from_integer(f, 5, 10);
    CHECK(std::abs(character(xi, x) - std::complex<double>(1.0, 0.0)) < 1e-15);
    const FiniteAdele half(f, -1, {1}, 10);
    CHECK(std::abs(character(half, FiniteAdele::from_integer(f, 1, 10)) + 1.0) < 1e-15);
}

TEST_CASE("character is multiplicative in x") {
    const auto f = Filtration::factorial();
    RandomStream rng(17);
    for (int i = 0; i < 100; ++i) {
        const auto xi = random_adele(f, rng, 16);
        const auto x = random_adele(f, rng, 16);
        const auto y = random_adele(f, rng, 16);
        const auto lhs = character(xi, x + y);
        const auto rhs = character(xi, x) * character(xi, y);
        CHECK(std::abs(lhs - rhs) < 1e-12);
        CHECK(std::abs(std::abs(lhs) - 1.0) < 1e-14);
        const auto eta = random_adele(f, rng, 16);
        CHECK(std::abs(character(xi + eta, x) - character(xi, x) * character(eta, x)) < 1e-12);
    }
}

TEST_CASE("haar measures") {
    const auto f = Filtration::factorial();
    const auto o = FiniteAdele::zero(f, 10);
    CHECK(haar_measure(Ball{o, 0}) == 1);
    CHECK(haar_measure(Sphere{o, 1}) == 1);
    Rational sum = 0;
    for (int n = -40; n <= 4; ++n) sum += haar_measure(Sphere{o, n});
    CHECK(sum == f->psi_value(4) - f->psi_value(-41));
}

TEST_CASE("sphere sampling is uniform per digit") {
    const auto f = Filtration::factorial();
    RandomStream rng(23);
    const int n = 2;
    const int trunc = 3;
    std::vector<std::vector<double>> counts;
    for (int pos = -n; pos < trunc; ++pos) counts.emplace_back(f->radix(pos), 0.0);
    constexpr int draws = 100000;
    std::size_t in_coset = 0;
    for (int i = 0; i < draws; ++i) {
        const auto x = sample_uniform_sphere(f, n, trunc, rng);
        REQUIRE(x.norm_index() == n);
        for (int pos = -n; pos < trunc; ++pos) counts[pos + n][x.digit(pos)] += 1.0;
        if (x.digit(-n) == 1) ++in_coset;  // the coset e^{psi(-n)} + B_{n-1}
    }
    CHECK(counts[0][0] == 0.0);
    for (std::size_t p = 0; p < counts.size(); ++p) {
        std::vector<double> expected(counts[p].size(), 0.0);
        const double cells = p == 0 ? double(counts[p].size() - 1) : double(counts[p].size());
        for (std::size_t d = (p == 0 ? 1 : 0); d < expected.size(); ++d) expected[d] = draws / cells;
        std::vector<double> obs(counts[p].begin() + (p == 0), counts[p].end());
        std::vector<double> exp(expected.begin() + (p == 0), expected.end());
        CHECK(chi_squared_gof(obs, exp).p_value > 0.001);
    }
    const double ratio = (f->psi_value(n - 1) / f->sphere_measure(n)).convert_to<double>();
    const double se = std::sqrt(ratio * (1 - ratio) / draws);
    CHECK(std::abs(double(in_coset) / draws - ratio) < 4 * se);
}

TEST_CASE("text and json round trip") {
    const auto f = Filtration::lcm();
    RandomStream rng(2);
    for (int i = 0; i < 20; ++i) {
        const auto x = random_adele(f, rng);
        CHECK(FiniteAdele::parse(f, x.to_text()) == x);
        CHECK(FiniteAdele::from_json(f, x.to_json()) == x);
    }
    CHECK(FiniteAdele::parse(f, "inf:[]@4").is_zero());
}

TEST_CASE("filtrations never mix") {
    const auto a = FiniteAdele::from_integer(Filtration::factorial(), 1, 4);
    const auto b = FiniteAdele::from_integer(Filtration::lcm(), 1, 4);
    CHECK_THROWS_AS(a + b, UsageError);
    CHECK_THROWS_AS(FiniteAdele(Filtration::factorial(), 0, {2}, 3), UsageError);
}

}
