#include "adelic/adele.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "adelic/errors.hpp"

namespace adelic {

namespace {

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

BigInt floor_of(const Rational& q) {
    const BigInt& num = boost::multiprecision::numerator(q);
    const BigInt& den = boost::multiprecision::denominator(q);
    BigInt quot = num / den;  // truncates toward zero
    if (num < 0 && quot * den != num) quot -= 1;
    return quot;
}

void check_truncation(const Filtration& f, int truncation) {
    const auto w = f.window();
    if (truncation < w.lo || truncation > w.hi) {
        throw ResourceError("truncation index " + std::to_string(truncation) +
                            " is outside the filtration window [" + std::to_string(w.lo) + ", " +
                            std::to_string(w.hi) + "]");
    }
}

}  // namespace

FiniteAdele::FiniteAdele(FiltrationPtr filtration, int start, std::vector<std::uint64_t> digits,
                         int truncation)
    : filtration_(std::move(filtration)), gamma_(start), digits_(std::move(digits)),
      truncation_(truncation) {
    if (!filtration_) throw UsageError("finite adele needs a filtration");
    check_truncation(*filtration_, truncation_);
    if (start + static_cast<int>(digits_.size()) > truncation_) {
        // Digits at or above the truncation are unknown by definition.
        digits_.resize(static_cast<std::size_t>(std::max(0, truncation_ - start)));
    }
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        const int pos = start + static_cast<int>(i);
        const std::uint64_t r = filtration_->radix(pos);
        if (digits_[i] >= r) {
            throw UsageError("digit " + std::to_string(digits_[i]) + " at position " +
                             std::to_string(pos) + " exceeds radix " + std::to_string(r));
        }
    }
    normalize();
}

void FiniteAdele::normalize() {
    // Pad the known window up to the truncation so digits() always spans [gamma, T).
    if (gamma_) {
        const int len = truncation_ - *gamma_;
        if (len > 0) digits_.resize(static_cast<std::size_t>(len), 0);
    }
    std::size_t lead = 0;
    while (lead < digits_.size() && digits_[lead] == 0) ++lead;
    if (lead == digits_.size()) {
        gamma_.reset();
        digits_.clear();
        return;
    }
    *gamma_ += static_cast<int>(lead);
    digits_.erase(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(lead));
}

FiniteAdele FiniteAdele::zero(FiltrationPtr filtration, int truncation) {
    if (!filtration) throw UsageError("finite adele needs a filtration");
    check_truncation(*filtration, truncation);
    FiniteAdele z;
    z.filtration_ = std::move(filtration);
    z.truncation_ = truncation;
    return z;
}

FiniteAdele FiniteAdele::from_rational(FiltrationPtr filtration, const Rational& q,
                                       int truncation) {
    if (q == 0) return zero(std::move(filtration), truncation);
    const auto m = filtration->denominator_index(q);
    if (!m) {
        throw UsageError("rational has a denominator dividing no chain value of filtration '" +
                         filtration->name() + "' inside its window");
    }
    const int start = -*m;
    std::vector<std::uint64_t> digits;
    Rational rest = q;
    for (int pos = start; pos < truncation && rest != 0; ++pos) {
        // rest / e^{psi(pos)} is an integer by construction.
        const Rational scaled = rest / filtration->psi_value(pos);
        BigInt v = boost::multiprecision::numerator(scaled);
        const BigInt r = filtration->radix(pos);
        BigInt d = v % r;
        if (d < 0) d += r;
        digits.push_back(d.convert_to<std::uint64_t>());
        rest -= Rational(d) * filtration->psi_value(pos);
    }
    return FiniteAdele(std::move(filtration), start, std::move(digits), truncation);
}

FiniteAdele FiniteAdele::from_integer(FiltrationPtr filtration, long long v, int truncation) {
    return from_rational(std::move(filtration), Rational(v), truncation);
}

int FiniteAdele::norm_index() const {
    if (!gamma_) throw UsageError("the zero adele has no norm index");
    return -*gamma_;
}

std::uint64_t FiniteAdele::digit(int position) const {
    if (position >= truncation_) {
        throw PrecisionError("digit at position " + std::to_string(position) +
                             " lies beyond truncation " + std::to_string(truncation_));
    }
    if (!gamma_ || position < *gamma_) return 0;
    return digits_[static_cast<std::size_t>(position - *gamma_)];
}

Rational FiniteAdele::norm() const {
    if (!gamma_) return Rational(0);
    return filtration_->psi_value(-*gamma_);
}

Rational FiniteAdele::fractional_part() const {
    Rational sum = 0;
    if (!gamma_ || *gamma_ >= 0) return sum;
    for (int pos = *gamma_; pos < std::min(0, truncation_); ++pos) {
        const auto d = digits_[static_cast<std::size_t>(pos - *gamma_)];
        if (d != 0) sum += Rational(d) * filtration_->psi_value(pos);
    }
    return sum;
}

Rational FiniteAdele::value() const {
    Rational sum = 0;
    if (!gamma_) return sum;
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        if (digits_[i] != 0) {
            sum += Rational(digits_[i]) * filtration_->psi_value(*gamma_ + static_cast<int>(i));
        }
    }
    return sum;
}

FiniteAdele FiniteAdele::with_truncation(int truncation) const {
    if (truncation > truncation_) {
        throw PrecisionError("cannot extend truncation from " + std::to_string(truncation_) +
                             " to " + std::to_string(truncation));
    }
    if (!gamma_) return zero(filtration_, truncation);
    return FiniteAdele(filtration_, *gamma_, digits_, truncation);
}

std::string FiniteAdele::to_text() const {
    std::ostringstream os;
    if (gamma_) {
        os << *gamma_;
    } else {
        os << "inf";
    }
    os << ":[";
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        if (i) os << ',';
        os << digits_[i];
    }
    os << "]@" << truncation_;
    return os.str();
}

FiniteAdele FiniteAdele::parse(FiltrationPtr filtration, std::string_view text) {
    const auto fail = [&] {
        return UsageError("malformed adele text '" + std::string(text) +
                          "', expected gamma:[d0,d1,...]@T");
    };
    const auto colon = text.find(':');
    const auto open = text.find('[');
    const auto close = text.find(']');
    const auto at = text.find('@');
    if (colon == std::string_view::npos || open != colon + 1 || close == std::string_view::npos ||
        at != close + 1) {
        throw fail();
    }
    const auto parse_int = [&](std::string_view s, auto& out) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw fail();
    };
    int truncation = 0;
    parse_int(text.substr(at + 1), truncation);
    const auto head = text.substr(0, colon);
    std::vector<std::uint64_t> digits;
    auto body = text.substr(open + 1, close - open - 1);
    while (!body.empty()) {
        const auto comma = body.find(',');
        std::uint64_t d = 0;
        parse_int(body.substr(0, comma), d);
        digits.push_back(d);
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
    }
    if (head == "inf") {
        if (!digits.empty()) throw fail();
        return zero(std::move(filtration), truncation);
    }
    int gamma = 0;
    parse_int(head, gamma);
    if (!digits.empty() && digits.front() == 0) {
        throw UsageError("adele text '" + std::string(text) + "' has a zero leading digit");
    }
    return FiniteAdele(std::move(filtration), gamma, std::move(digits), truncation);
}

nlohmann::json FiniteAdele::to_json() const {
    nlohmann::json j;
    j["filtration"] = filtration_->name();
    j["gamma"] = gamma_ ? nlohmann::json(*gamma_) : nlohmann::json(nullptr);
    j["digits"] = digits_;
    j["truncation"] = truncation_;
    return j;
}

FiniteAdele FiniteAdele::from_json(FiltrationPtr filtration, const nlohmann::json& j) {
    try {
        if (j.contains("filtration") && j.at("filtration").get<std::string>() != filtration->name()) {
            throw UsageError("adele belongs to filtration '" + j.at("filtration").get<std::string>() +
                             "', not '" + filtration->name() + "'");
        }
        const int truncation = j.at("truncation").get<int>();
        if (j.at("gamma").is_null()) return zero(std::move(filtration), truncation);
        return FiniteAdele(std::move(filtration), j.at("gamma").get<int>(),
                           j.at("digits").get<std::vector<std::uint64_t>>(), truncation);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed adele JSON: ") + e.what());
    }
}

void require_same_filtration(const FiniteAdele& x, const FiniteAdele& y) {
    if (x.filtration() != y.filtration()) {
        throw UsageError("adeles over different filtrations ('" + x.filtration()->name() +
                         "' vs '" + y.filtration()->name() + "') cannot be combined");
    }
}

FiniteAdele FiniteAdele::operator-() const {
    if (!gamma_) return *this;
    // Radix complement: r - d at the leading digit, r - 1 - d afterwards.
    std::vector<std::uint64_t> out(digits_.size());
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        const auto r = filtration_->radix(*gamma_ + static_cast<int>(i));
        out[i] = (i == 0 ? r - digits_[i] : r - 1 - digits_[i]);
    }
    return FiniteAdele(filtration_, *gamma_, std::move(out), truncation_);
}

FiniteAdele operator+(const FiniteAdele& x, const FiniteAdele& y) {
    require_same_filtration(x, y);
    const int truncation = std::min(x.truncation_, y.truncation_);
    if (x.is_zero() && y.is_zero()) return FiniteAdele::zero(x.filtration_, truncation);
    int start = truncation;
    if (x.gamma_) start = std::min(start, *x.gamma_);
    if (y.gamma_) start = std::min(start, *y.gamma_);
    if (start >= truncation) return FiniteAdele::zero(x.filtration_, truncation);
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(truncation - start));
    std::uint64_t carry = 0;
    for (int pos = start; pos < truncation; ++pos) {
        const std::uint64_t r = x.filtration_->radix(pos);
        // digits < r and carry <= 1, so the sum stays below 2r.
        std::uint64_t s = x.digit(pos) + y.digit(pos) + carry;
        carry = s >= r ? 1 : 0;
        if (carry) s -= r;
        out.push_back(s);
    }
    return FiniteAdele(x.filtration_, start, std::move(out), truncation);
}

bool operator==(const FiniteAdele& x, const FiniteAdele& y) {
    return x.filtration_ == y.filtration_ && x.truncation_ == y.truncation_ &&
           x.gamma_ == y.gamma_ && x.digits_ == y.digits_;
}

namespace {

// Checks whether the ambiguity of xi*x, coming from the unknown digits of
// both operands, lies inside e^{psi(n)} Z-hat. Each error term is a rational
// multiple of Z-hat, and q Z-hat lies in e^{psi(n)} Z-hat iff q / e^{psi(n)} is
// an integer.
bool product_determined_to(const FiniteAdele& xi, const FiniteAdele& x, int n) {
    const auto& f = *x.filtration();
    const Rational unit = f.psi_value(n);
    const Rational dx = f.psi_value(x.truncation());
    const Rational dxi = f.psi_value(xi.truncation());
    return is_integer(xi.value() * dx / unit) && is_integer(x.value() * dxi / unit) &&
           is_integer(dx * dxi / unit);
}

}  // namespace

FiniteAdele multiply(const FiniteAdele& x, const FiniteAdele& y) {
    require_same_filtration(x, y);
    const auto& f = x.filtration();
    const auto w = f->window();
    int truncation = w.lo - 1;
    for (int n = w.hi; n >= w.lo; --n) {
        if (product_determined_to(x, y, n)) {
            truncation = n;
            break;
        }
    }
    if (truncation < w.lo) {
        throw PrecisionError("product of " + x.to_text() + " and " + y.to_text() +
                             " is not determined at any index of the window");
    }
    return FiniteAdele::from_rational(f, x.value() * y.value(), truncation);
}

Rational fractional_part_of_product(const FiniteAdele& xi, const FiniteAdele& x) {
    require_same_filtration(xi, x);
    if (!product_determined_to(xi, x, 0)) {
        throw PrecisionError("fractional part of the product of " + xi.to_text() + " and " +
                             x.to_text() + " depends on unknown digits; raise the truncations");
    }
    const Rational p = xi.value() * x.value();
    return p - Rational(floor_of(p));
}

std::complex<double> unit_root(const Rational& q) {
    Rational frac = q - Rational(floor_of(q));
    if (frac > Rational(1, 2)) frac -= 1;  // angle in (-pi, pi]
    if (frac == 0) return {1.0, 0.0};
    if (frac == Rational(1, 2)) return {-1.0, 0.0};
    if (frac == Rational(1, 4)) return {0.0, 1.0};
    if (frac == Rational(-1, 4)) return {0.0, -1.0};
    const double angle = 2.0 * std::numbers::pi * frac.convert_to<double>();
    return {std::cos(angle), std::sin(angle)};
}

std::complex<double> character(const FiniteAdele& xi, const FiniteAdele& x) {
    return unit_root(fractional_part_of_product(xi, x));
}

bool Ball::contains(const FiniteAdele& x) const {
    const FiniteAdele d = x - center;
    if (d.order()) return *d.order() >= -radius_index;
    if (d.truncation() >= -radius_index) return true;
    throw PrecisionError("ball membership undecidable at truncation " +
                         std::to_string(d.truncation()));
}

bool Sphere::contains(const FiniteAdele& x) const {
    const FiniteAdele d = x - center;
    if (d.order()) return *d.order() == -radius_index;
    if (d.truncation() > -radius_index) return false;
    throw PrecisionError("sphere membership undecidable at truncation " +
                         std::to_string(d.truncation()));
}

Rational haar_measure(const Ball& b) { return b.center.filtration()->ball_measure(b.radius_index); }

Rational haar_measure(const Sphere& s) {
    return s.center.filtration()->sphere_measure(s.radius_index);
}

FiniteAdele sample_uniform_sphere(const FiltrationPtr& filtration, int n, int truncation,
                                  RandomStream& rng) {
    const int start = -n;
    if (truncation <= start) {
        throw UsageError("sphere sampling needs truncation > " + std::to_string(start));
    }
    std::vector<std::uint64_t> digits(static_cast<std::size_t>(truncation - start));
    digits[0] = rng.uniform_int(1, filtration->radix(start) - 1);
    for (int pos = start + 1; pos < truncation; ++pos) {
        digits[static_cast<std::size_t>(pos - start)] =
            rng.uniform_int(0, filtration->radix(pos) - 1);
    }
    return FiniteAdele(filtration, start, std::move(digits), truncation);
}

FiniteAdele sample_uniform_ball(const FiltrationPtr& filtration, int n, int truncation,
                                RandomStream& rng) {
    const int start = -n;
    if (truncation <= start) {
        throw UsageError("ball sampling needs truncation > " + std::to_string(start));
    }
    std::vector<std::uint64_t> digits(static_cast<std::size_t>(truncation - start));
    for (int pos = start; pos < truncation; ++pos) {
        digits[static_cast<std::size_t>(pos - start)] =
            rng.uniform_int(0, filtration->radix(pos) - 1);
    }
    return FiniteAdele(filtration, start, std::move(digits), truncation);
}

}  // namespace adelic
