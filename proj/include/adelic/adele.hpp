#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "adelic/filtration.hpp"
#include "adelic/random.hpp"

namespace adelic {

/**
 * A finite adele x = sum_{l >= gamma} x_l e^{psi(l)} known modulo B_{-T}.
 *
 * Digits are stored for positions gamma .. T-1 with x_l < e^{Lambda(l+1)} and
 * a nonzero leading digit. Positions >= T are unknown; every operation
 * reports its result only to the window the operands justify. When all known
 * digits vanish the value is zero up to truncation and order() is empty.
 */
class FiniteAdele {
public:
    // Leading zero digits are stripped; throws UsageError on out-of-range digits.
    FiniteAdele(FiltrationPtr filtration, int start, std::vector<std::uint64_t> digits,
                int truncation);

    static FiniteAdele zero(FiltrationPtr filtration, int truncation);

    // Greedy mixed-radix expansion of q; negative q via radix complement.
    // Throws UsageError when the denominator divides no chain value in the window.
    static FiniteAdele from_rational(FiltrationPtr filtration, const Rational& q, int truncation);
    static FiniteAdele from_integer(FiltrationPtr filtration, long long v, int truncation);

    const FiltrationPtr& filtration() const { return filtration_; }

    // Adelic order gamma; empty means zero (up to truncation).
    std::optional<int> order() const { return gamma_; }
    bool is_zero() const { return !gamma_.has_value(); }
    int truncation() const { return truncation_; }

    // Norm index n with ||x|| = e^{psi(n)}, i.e. -gamma. Throws for zero.
    int norm_index() const;

    // Digits at positions order() .. truncation()-1.
    std::span<const std::uint64_t> digits() const { return digits_; }

    // Digit at a position below the truncation (zero below the order).
    std::uint64_t digit(int position) const;

    Rational norm() const;
    Rational fractional_part() const;

    // Exact value of the finite representative sum x_l e^{psi(l)}.
    Rational value() const;

    FiniteAdele with_truncation(int truncation) const;

    // Text form "gamma:[d0,d1,...]@T", "inf:[]@T" for zero.
    std::string to_text() const;
    static FiniteAdele parse(FiltrationPtr filtration, std::string_view text);

    nlohmann::json to_json() const;
    static FiniteAdele from_json(FiltrationPtr filtration, const nlohmann::json& j);

    FiniteAdele operator-() const;
    friend FiniteAdele operator+(const FiniteAdele& x, const FiniteAdele& y);
    friend FiniteAdele operator-(const FiniteAdele& x, const FiniteAdele& y) { return x + (-y); }

    // Same filtration, truncation, order and digits.
    friend bool operator==(const FiniteAdele& x, const FiniteAdele& y);

private:
    FiniteAdele() = default;
    void normalize();

    FiltrationPtr filtration_;
    std::optional<int> gamma_;
    std::vector<std::uint64_t> digits_;
    int truncation_ = 0;
};

void require_same_filtration(const FiniteAdele& x, const FiniteAdele& y);

// Product of the representatives, truncated to the window the operand
// truncations justify.
FiniteAdele multiply(const FiniteAdele& x, const FiniteAdele& y);

// {xi x} as an exact rational in [0, 1). Throws PrecisionError when the
// operand truncations leave the fractional part undetermined.
Rational fractional_part_of_product(const FiniteAdele& xi, const FiniteAdele& x);

// chi_xi(x) = exp(2 pi i {xi x}).
std::complex<double> character(const FiniteAdele& xi, const FiniteAdele& x);

// exp(2 pi i q) for an exact rational, reduced mod 1 first.
std::complex<double> unit_root(const Rational& q);

struct Ball {
    FiniteAdele center;
    int radius_index = 0;  // radius e^{psi(radius_index)}

    bool contains(const FiniteAdele& x) const;
};

struct Sphere {
    FiniteAdele center;
    int radius_index = 0;

    bool contains(const FiniteAdele& x) const;
};

Rational haar_measure(const Ball& b);
Rational haar_measure(const Sphere& s);

// Haar-uniform point of S_n known to truncation `truncation` (> -n).
FiniteAdele sample_uniform_sphere(const FiltrationPtr& filtration, int n, int truncation,
                                  RandomStream& rng);

// Haar-uniform point of B_n.
FiniteAdele sample_uniform_ball(const FiltrationPtr& filtration, int n, int truncation,
                                RandomStream& rng);

}  // namespace adelic
