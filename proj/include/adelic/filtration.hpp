#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace adelic {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Closed range of signed indices [lo, hi].
struct IndexWindow {
    int lo = -96;
    int hi = 96;

    bool contains(int n) const { return lo <= n && n <= hi; }
    friend bool operator==(const IndexWindow&, const IndexWindow&) = default;
};

enum class CustomExtension { periodic, reject };

struct CofinalityEntry {
    std::uint64_t m = 0;
    std::optional<int> first_index;  // least n >= 0 with m | e^{psi(n)}
};

struct CofinalityReport {
    std::vector<CofinalityEntry> entries;
    bool all_covered = true;
};

class Filtration;
using FiltrationPtr = std::shared_ptr<const Filtration>;

/**
 * A strictly increasing division chain 1 = e^{psi(0)} | e^{psi(1)} | ...
 * extended to negative indices by e^{psi(-n)} = 1 / e^{psi(n)}.
 *
 * The chain is fixed by its ratios e^{Lambda(n)} = e^{psi(n)} / e^{psi(n-1)},
 * each an integer >= 2. For n <= 0 the ratio is e^{Lambda(1-n)}, which keeps
 * e^{psi(n)} / e^{psi(n-1)} = e^{Lambda(n)} valid on all of Z.
 *
 * Every chain value inside the window is computed exactly at construction, so
 * a Filtration is immutable and safe to share between threads.
 */
class Filtration {
public:
    using RatioRule = std::function<std::uint64_t(int)>;

    static constexpr std::size_t default_max_bits = 1u << 15;

    Filtration(std::string name, RatioRule rule, IndexWindow window,
               std::size_t max_bits = default_max_bits);

    static FiltrationPtr factorial(IndexWindow window = {});
    static FiltrationPtr prime_power(std::uint64_t p, IndexWindow window = {});
    static FiltrationPtr lcm(IndexWindow window = {});
    static FiltrationPtr custom(std::vector<std::uint64_t> ratios, CustomExtension extension,
                                IndexWindow window = {});

    const std::string& name() const { return name_; }
    IndexWindow window() const { return window_; }

    // e^{Lambda(n)} for any n with |n| and |1-n| covered by the window.
    std::uint64_t ratio(int n) const;

    // Radix of the digit at position l, i.e. e^{Lambda(l+1)}.
    std::uint64_t radix(int position) const { return ratio(position + 1); }

    // e^{psi(n)} for 0 <= n <= max(|lo|, hi).
    const BigInt& chain_value(int n) const;

    // Exact e^{psi(n)} for n in the window.
    Rational psi_value(int n) const;

    // ln e^{psi(n)} = psi(n) at double precision.
    double log_psi(int n) const;

    // e^{psi(n)} as a double; overflows to inf and underflows to 0.
    double psi_double(int n) const;

    // Haar measure of B_n and S_n.
    Rational ball_measure(int n) const { return psi_value(n); }
    Rational sphere_measure(int n) const;
    double sphere_measure_double(int n) const;

    // Largest n in the window with q in e^{psi(n)} Z; nullopt for q == 0.
    // Throws ResourceError if the order falls outside the window.
    std::optional<int> order_of(const Rational& q) const;

    // Least index m >= 0 with q * e^{psi(m)} integral, if one exists in the window.
    std::optional<int> denominator_index(const Rational& q) const;

    CofinalityReport validate_cofinality(std::uint64_t bound) const;

    // Largest |n| for which chain values are available.
    int extent() const { return extent_; }

private:
    void check_index(int n) const;

    std::string name_;
    IndexWindow window_;
    int extent_ = 0;
    std::vector<std::uint64_t> ratios_;  // ratios_[n] = e^{Lambda(n)}, n >= 1
    std::vector<BigInt> values_;         // values_[n] = e^{psi(n)}, n >= 0
    std::vector<double> logs_;           // logs_[n] = psi(n), n >= 0
};

}  // namespace adelic
