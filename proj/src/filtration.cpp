#include "adelic/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "adelic/errors.hpp"

namespace adelic {

namespace {

double log_bigint(const BigInt& v) {
    const auto bits = static_cast<long>(boost::multiprecision::msb(v)) + 1;
    if (bits <= 900) {
        return std::log(v.convert_to<double>());
    }
    const long shift = bits - 64;
    const BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

// Base prime of every prime power > 1, in increasing order of the power.
// lcm(1..N) gains a factor p exactly when N is a power of p.
std::vector<std::uint64_t> lcm_ratios(std::size_t count) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 2; out.size() < count; ++n) {
        std::uint64_t p = 0;
        for (std::uint64_t d = 2; d <= n; ++d) {
            if (n % d == 0) {
                p = d;
                break;
            }
        }
        std::uint64_t m = n;
        while (m % p == 0) m /= p;
        if (m == 1) out.push_back(p);
    }
    return out;
}

}  // namespace

Filtration::Filtration(std::string name, RatioRule rule, IndexWindow window, std::size_t max_bits)
    : name_(std::move(name)), window_(window) {
    if (window.lo > 0 || window.hi < 0) {
        throw UsageError("filtration window [" + std::to_string(window.lo) + ", " +
                         std::to_string(window.hi) + "] must contain 0");
    }
    extent_ = std::max(-window.lo, window.hi);
    const int top = extent_ + 1;
    ratios_.assign(static_cast<std::size_t>(top) + 1, 0);
    values_.reserve(static_cast<std::size_t>(top) + 1);
    logs_.reserve(static_cast<std::size_t>(top) + 1);
    values_.emplace_back(1);
    logs_.push_back(0.0);
    for (int n = 1; n <= top; ++n) {
        const std::uint64_t r = rule(n);
        if (r < 2) {
            throw UsageError("filtration '" + name_ + "': ratio e^{Lambda(" + std::to_string(n) +
                             ")} = " + std::to_string(r) + " is below 2");
        }
        ratios_[static_cast<std::size_t>(n)] = r;
        BigInt next = values_.back() * r;
        if (boost::multiprecision::msb(next) + 1 > max_bits) {
            throw ResourceError("filtration '" + name_ + "': e^{psi(" + std::to_string(n) +
                                ")} exceeds the big-integer budget of " +
                                std::to_string(max_bits) + " bits; shrink the window");
        }
        logs_.push_back(log_bigint(next));
        values_.push_back(std::move(next));
    }
}

FiltrationPtr Filtration::factorial(IndexWindow window) {
    return std::make_shared<const Filtration>(
        "factorial", [](int n) { return static_cast<std::uint64_t>(n) + 1; }, window);
}

FiltrationPtr Filtration::prime_power(std::uint64_t p, IndexWindow window) {
    if (!is_prime(p)) {
        throw UsageError("prime_power filtration needs a prime, got " + std::to_string(p));
    }
    return std::make_shared<const Filtration>(
        "prime_power(" + std::to_string(p) + ")", [p](int) { return p; }, window);
}

FiltrationPtr Filtration::lcm(IndexWindow window) {
    const int extent = std::max(-window.lo, window.hi) + 1;
    auto ratios = lcm_ratios(static_cast<std::size_t>(extent));
    return std::make_shared<const Filtration>(
        "lcm",
        [ratios = std::move(ratios)](int n) { return ratios[static_cast<std::size_t>(n - 1)]; },
        window);
}

FiltrationPtr Filtration::custom(std::vector<std::uint64_t> ratios, CustomExtension extension,
                                 IndexWindow window) {
    if (ratios.empty()) {
        throw UsageError("custom filtration needs at least one ratio");
    }
    const auto len = static_cast<int>(ratios.size());
    const int needed = std::max(-window.lo, window.hi) + 1;
    if (extension == CustomExtension::reject && needed > len) {
        throw UsageError("custom filtration lists " + std::to_string(len) +
                         " ratios but the window needs " + std::to_string(needed) +
                         "; enlarge the list or use periodic extension");
    }
    return std::make_shared<const Filtration>(
        "custom",
        [ratios = std::move(ratios)](int n) {
            return ratios[static_cast<std::size_t>(n - 1) % ratios.size()];
        },
        window);
}

void Filtration::check_index(int n) const {
    if (!window_.contains(n)) {
        throw ResourceError("index " + std::to_string(n) + " is outside the filtration window [" +
                            std::to_string(window_.lo) + ", " + std::to_string(window_.hi) + "]");
    }
}

std::uint64_t Filtration::ratio(int n) const {
    const int k = n >= 1 ? n : 1 - n;
    if (k > extent_ + 1) {
        throw ResourceError("ratio index " + std::to_string(n) +
                            " is outside the filtration window [" + std::to_string(window_.lo) +
                            ", " + std::to_string(window_.hi) + "]");
    }
    return ratios_[static_cast<std::size_t>(k)];
}

const BigInt& Filtration::chain_value(int n) const {
    if (n < 0 || n > extent_ + 1) {
        throw ResourceError("chain value e^{psi(" + std::to_string(n) + ")} is not available");
    }
    return values_[static_cast<std::size_t>(n)];
}

Rational Filtration::psi_value(int n) const {
    check_index(n);
    if (n >= 0) return Rational(values_[static_cast<std::size_t>(n)]);
    return Rational(BigInt(1), values_[static_cast<std::size_t>(-n)]);
}

double Filtration::log_psi(int n) const {
    check_index(n);
    return n >= 0 ? logs_[static_cast<std::size_t>(n)] : -logs_[static_cast<std::size_t>(-n)];
}

double Filtration::psi_double(int n) const {
    const double lg = log_psi(n);
    if (std::abs(lg) > 700.0) return std::exp(lg);
    const double v = values_[static_cast<std::size_t>(n >= 0 ? n : -n)].convert_to<double>();
    return n >= 0 ? v : 1.0 / v;
}

Rational Filtration::sphere_measure(int n) const { return psi_value(n) - psi_value(n - 1); }

double Filtration::sphere_measure_double(int n) const {
    // e^{psi(n)} (1 - 1/e^{Lambda(n)})
    const double r = static_cast<double>(ratio(n));
    return psi_double(n) * ((r - 1.0) / r);
}

std::optional<int> Filtration::denominator_index(const Rational& q) const {
    const BigInt den = boost::multiprecision::denominator(q);
    for (int m = 0; m <= extent_; ++m) {
        if (values_[static_cast<std::size_t>(m)] % den == 0) return m;
    }
    return std::nullopt;
}

std::optional<int> Filtration::order_of(const Rational& q) const {
    if (q == 0) return std::nullopt;
    const BigInt num = boost::multiprecision::abs(boost::multiprecision::numerator(q));
    const BigInt den = boost::multiprecision::denominator(q);
    if (den != 1) {
        const auto m = denominator_index(q);
        if (!m) {
            throw UsageError("denominator of the rational is not a divisor of any chain value in "
                             "the window of filtration '" + name_ + "'");
        }
        check_index(-*m);
        return -*m;
    }
    int n = 0;
    while (n + 1 <= extent_ && num % values_[static_cast<std::size_t>(n + 1)] == 0) ++n;
    if (n + 1 > extent_) {
        throw ResourceError("order of integer exceeds the filtration window of '" + name_ + "'");
    }
    return n;
}

CofinalityReport Filtration::validate_cofinality(std::uint64_t bound) const {
    if (bound < 1) throw UsageError("cofinality bound must be >= 1");
    CofinalityReport report;
    for (std::uint64_t m = 1; m <= bound; ++m) {
        CofinalityEntry entry{m, std::nullopt};
        for (int n = 0; n <= extent_ + 1; ++n) {
            if (values_[static_cast<std::size_t>(n)] % m == 0) {
                entry.first_index = n;
                break;
            }
        }
        if (!entry.first_index) report.all_covered = false;
        report.entries.push_back(entry);
    }
    return report;
}

}  // namespace adelic
