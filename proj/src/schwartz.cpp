#include "adelic/schwartz.hpp"

#include <cmath>
#include <numbers>
#include <span>

#include "adelic/errors.hpp"

namespace adelic {

std::optional<int> norm_index_of(const Filtration& f, const Rational& norm) {
    if (norm == 0) return std::nullopt;
    const auto w = f.window();
    for (int m = w.lo; m <= w.hi; ++m) {
        if (f.psi_value(m) == norm) return m;
    }
    throw UsageError("norm is not a chain value e^{psi(m)} inside the window of '" + f.name() + "'");
}

Rational char_integral_ball(const Filtration& f, int n, std::optional<int> xi_norm_index) {
    // ||xi|| <= e^{-psi(n)} = e^{psi(-n)}
    if (!xi_norm_index || *xi_norm_index <= -n) return f.psi_value(n);
    return Rational(0);
}

Rational char_integral_ball(const Filtration& f, int n, const Rational& xi_norm) {
    return char_integral_ball(f, n, norm_index_of(f, xi_norm));
}

Rational char_integral_sphere(const Filtration& f, int n, std::optional<int> xi_norm_index) {
    if (!xi_norm_index || *xi_norm_index <= -n) return f.sphere_measure(n);
    if (*xi_norm_index == 1 - n) return -f.psi_value(n - 1);
    return Rational(0);
}

Rational char_integral_sphere(const Filtration& f, int n, const Rational& xi_norm) {
    return char_integral_sphere(f, n, norm_index_of(f, xi_norm));
}

// ---------------------------------------------------------------------------
// TestFunction

std::size_t TestFunction::dimension(const Filtration& f, int k, int l) {
    if (l > k) {
        throw UsageError("constancy index l = " + std::to_string(l) +
                         " exceeds support index k = " + std::to_string(k));
    }
    std::size_t dim = 1;
    for (int pos = -k; pos < -l; ++pos) {
        const auto r = f.radix(pos);
        if (dim > max_dimension / r) {
            throw ResourceError("dimension of D_" + std::to_string(k) + "^" + std::to_string(l) +
                                " exceeds " + std::to_string(max_dimension));
        }
        dim *= r;
    }
    return dim;
}

TestFunction::TestFunction(FiltrationPtr filtration, int k, int l, std::vector<Complex> coefficients)
    : filtration_(std::move(filtration)), k_(k), l_(l), coeffs_(std::move(coefficients)) {
    const auto dim = dimension(*filtration_, k, l);
    if (coeffs_.size() != dim) {
        throw UsageError("D_" + std::to_string(k) + "^" + std::to_string(l) + " has dimension " +
                         std::to_string(dim) + " but " + std::to_string(coeffs_.size()) +
                         " coefficients were given");
    }
}

TestFunction TestFunction::zero(FiltrationPtr filtration, int k, int l) {
    const auto dim = dimension(*filtration, k, l);
    return TestFunction(std::move(filtration), k, l, std::vector<Complex>(dim));
}

TestFunction TestFunction::ball_indicator(FiltrationPtr filtration, int k, int l, int ball_index) {
    if (ball_index < l || ball_index > k) {
        throw UsageError("ball B_" + std::to_string(ball_index) + " is not in D_" +
                         std::to_string(k) + "^" + std::to_string(l));
    }
    TestFunction tf = zero(std::move(filtration), k, l);
    // Cosets inside B_j have zero digits at positions -k .. -j-1.
    std::size_t stride = 1;
    for (int pos = -k; pos < -ball_index; ++pos) stride *= tf.filtration_->radix(pos);
    for (std::size_t a = 0; a < tf.coeffs_.size(); a += stride) tf.coeffs_[a] = 1.0;
    return tf;
}

std::vector<std::uint64_t> TestFunction::radices() const {
    std::vector<std::uint64_t> out;
    for (int pos = -k_; pos < -l_; ++pos) out.push_back(filtration_->radix(pos));
    return out;
}

FiniteAdele TestFunction::representative(std::size_t index) const {
    std::vector<std::uint64_t> digits;
    for (int pos = -k_; pos < -l_; ++pos) {
        const auto r = filtration_->radix(pos);
        digits.push_back(index % r);
        index /= r;
    }
    return FiniteAdele(filtration_, -k_, std::move(digits), -l_);
}

std::optional<std::size_t> TestFunction::coset_of(const FiniteAdele& x) const {
    if (x.filtration() != filtration_) {
        throw UsageError("test function and point use different filtrations");
    }
    if (x.order() && *x.order() < -k_) return std::nullopt;
    std::size_t index = 0;
    std::size_t place = 1;
    for (int pos = -k_; pos < -l_; ++pos) {
        index += place * x.digit(pos);
        place *= filtration_->radix(pos);
    }
    return index;
}

Complex TestFunction::operator()(const FiniteAdele& x) const {
    const auto idx = coset_of(x);
    return idx ? coeffs_[*idx] : Complex{};
}

nlohmann::json TestFunction::to_json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (std::size_t a = 0; a < coeffs_.size(); ++a) {
        coeffs.push_back({{"rep", representative(a).to_text()},
                          {"re", coeffs_[a].real()},
                          {"im", coeffs_[a].imag()}});
    }
    return {{"k", k_}, {"l", l_}, {"coeffs", coeffs}};
}

TestFunction TestFunction::from_json(FiltrationPtr filtration, const nlohmann::json& j) {
    try {
        TestFunction tf = zero(filtration, j.at("k").get<int>(), j.at("l").get<int>());
        for (const auto& c : j.at("coeffs")) {
            const FiniteAdele rep = FiniteAdele::parse(filtration, c.at("rep").get<std::string>());
            const auto idx = tf.coset_of(rep);
            if (!idx) {
                throw UsageError("representative " + rep.to_text() + " lies outside B_" +
                                 std::to_string(tf.k_));
            }
            tf.coeffs_[*idx] = Complex(c.value("re", 0.0), c.value("im", 0.0));
        }
        return tf;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed test function JSON: ") + e.what());
    }
}

Complex inner_product(const TestFunction& phi, const TestFunction& psi) {
    if (phi.filtration() != psi.filtration() ||
        phi.support_index() != psi.support_index() ||
        phi.constancy_index() != psi.constancy_index()) {
        throw UsageError("inner product needs test functions from the same space D_k^l");
    }
    Complex sum{};
    const auto& a = phi.coefficients();
    const auto& b = psi.coefficients();
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * std::conj(b[i]);
    return sum * phi.filtration()->psi_double(phi.constancy_index());
}

namespace {

// Mixed-radix decimation in time. in[j * stride], j < M, is transformed into
// out[b] = sum_j in[j*stride] w^{j b} with w = roots[root_step], a primitive
// M-th root of unity.
void mixed_radix_dft(const Complex* in, std::size_t stride, std::span<const std::uint64_t> radices,
                     const std::vector<Complex>& roots, std::size_t root_step, Complex* out) {
    if (radices.empty()) {
        out[0] = in[0];
        return;
    }
    const std::size_t r = radices[0];
    std::size_t m = 1;
    for (auto q : radices) m *= q;
    const std::size_t sub = m / r;
    std::vector<Complex> partial(m);
    for (std::size_t a0 = 0; a0 < r; ++a0) {
        mixed_radix_dft(in + a0 * stride, stride * r, radices.subspan(1), roots, root_step * r,
                        partial.data() + a0 * sub);
    }
    for (std::size_t b = 0; b < m; ++b) {
        Complex acc = partial[b % sub];
        std::size_t tw = 0;
        for (std::size_t a0 = 1; a0 < r; ++a0) {
            tw += b;
            if (tw >= m) tw %= m;
            acc += roots[tw * root_step] * partial[a0 * sub + b % sub];
        }
        out[b] = acc;
    }
}

TestFunction transform(const TestFunction& phi, int sign) {
    const auto& f = phi.filtration();
    const std::size_t n = phi.dimension();
    std::vector<Complex> roots(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Rational q(static_cast<long long>(j), static_cast<long long>(n));
        roots[j] = unit_root(sign > 0 ? q : -q);
    }
    const auto radices = phi.radices();
    std::vector<Complex> out(n);
    mixed_radix_dft(phi.coefficients().data(), 1, radices, roots, 1, out.data());
    const double scale = f->psi_double(phi.constancy_index());
    for (auto& v : out) v *= scale;
    return TestFunction(f, -phi.constancy_index(), -phi.support_index(), std::move(out));
}

}  // namespace

TestFunction fourier(const TestFunction& phi) { return transform(phi, +1); }

TestFunction inverse_fourier(const TestFunction& phi) { return transform(phi, -1); }

std::vector<Complex> fourier_matrix(const FiltrationPtr& filtration, int k, int l, std::size_t cap) {
    const auto dim = TestFunction::dimension(*filtration, k, l);
    if (dim > cap) {
        throw ResourceError("dense Fourier matrix of dimension " + std::to_string(dim) +
                            " exceeds the cap " + std::to_string(cap));
    }
    const TestFunction domain = TestFunction::zero(filtration, k, l);
    const TestFunction range = TestFunction::zero(filtration, -l, -k);
    const double scale = filtration->psi_double(l);
    std::vector<FiniteAdele> xs;
    xs.reserve(dim);
    for (std::size_t a = 0; a < dim; ++a) xs.push_back(domain.representative(a));
    std::vector<Complex> m(dim * dim);
    for (std::size_t b = 0; b < dim; ++b) {
        const FiniteAdele xi = range.representative(b);
        for (std::size_t a = 0; a < dim; ++a) m[b * dim + a] = scale * character(xi, xs[a]);
    }
    return m;
}

TestFunction radialize(const TestFunction& phi) {
    const int k = phi.support_index();
    const int l = phi.constancy_index();
    // Sphere of each coset: the position of its lowest-order nonzero digit.
    const auto radices = phi.radices();
    std::vector<int> sphere(phi.dimension());
    std::map<int, std::pair<Complex, std::size_t>> sums;
    for (std::size_t a = 0; a < phi.dimension(); ++a) {
        std::size_t rest = a;
        int pos = -k;
        for (auto r : radices) {
            if (rest % r != 0) break;
            rest /= r;
            ++pos;
        }
        const int m = -pos;  // m == l marks the coset B_l itself
        sphere[a] = m;
        auto& s = sums[m];
        s.first += phi.coefficients()[a];
        s.second += 1;
    }
    std::vector<Complex> out(phi.dimension());
    for (std::size_t a = 0; a < out.size(); ++a) {
        const auto& s = sums[sphere[a]];
        out[a] = s.first / static_cast<double>(s.second);
    }
    return TestFunction(phi.filtration(), k, l, std::move(out));
}

// ---------------------------------------------------------------------------
// RadialProfile

RadialProfile::RadialProfile(FiltrationPtr filtration, std::map<int, Complex> coefficients)
    : filtration_(std::move(filtration)), coeffs_(std::move(coefficients)) {
    for (const auto& [n, c] : coeffs_) {
        if (!filtration_->window().contains(n - 1) || !filtration_->window().contains(n)) {
            throw ResourceError("profile sphere index " + std::to_string(n) +
                                " is outside the filtration window");
        }
    }
}

RadialProfile RadialProfile::sphere(FiltrationPtr filtration, int n) {
    return RadialProfile(std::move(filtration), {{n, Complex(1.0, 0.0)}});
}

Complex RadialProfile::operator()(std::optional<int> norm_index) const {
    if (!norm_index) return {};
    const auto it = coeffs_.find(*norm_index);
    return it == coeffs_.end() ? Complex{} : it->second;
}

RadialProfile RadialProfile::apply_multiplier(const std::function<Complex(int)>& symbol) const {
    std::map<int, Complex> out;
    for (const auto& [n, c] : coeffs_) out[n] = c * symbol(n);
    return RadialProfile(filtration_, std::move(out));
}

RadialProfile RadialProfile::apply_symbol(double alpha) const {
    return apply_multiplier([&](int n) { return Complex(eigenvalue(*filtration_, n, alpha)); });
}

RadialProfile RadialProfile::apply_semigroup(double alpha, double t) const {
    return apply_multiplier([&](int n) {
        return Complex(std::exp(-t * eigenvalue(*filtration_, n, alpha)));
    });
}

Complex RadialProfile::inverse_at(std::optional<int> norm_index) const {
    Complex sum{};
    for (const auto& [n, c] : coeffs_) {
        const Rational w = char_integral_sphere(*filtration_, n, norm_index);
        if (w != 0) sum += c * w.convert_to<double>();
    }
    return sum;
}

int RadialProfile::min_index() const {
    if (coeffs_.empty()) throw UsageError("empty radial profile");
    return coeffs_.begin()->first;
}

int RadialProfile::max_index() const {
    if (coeffs_.empty()) throw UsageError("empty radial profile");
    return coeffs_.rbegin()->first;
}

TestFunction RadialProfile::to_test_function(int k, int l) const {
    if (!coeffs_.empty() && (max_index() > k || min_index() <= l)) {
        throw UsageError("profile spheres do not fit in D_" + std::to_string(k) + "^" +
                         std::to_string(l));
    }
    TestFunction tf = TestFunction::zero(filtration_, k, l);
    const auto radices = tf.radices();
    for (std::size_t a = 1; a < tf.dimension(); ++a) {
        std::size_t rest = a;
        int pos = -k;
        for (auto r : radices) {
            if (rest % r != 0) break;
            rest /= r;
            ++pos;
        }
        tf.coefficients()[a] = (*this)(-pos);
    }
    return tf;
}

double eigenfunction_eval(const Filtration& f, int n, std::optional<int> x_norm_index) {
    return char_integral_sphere(f, n, x_norm_index).convert_to<double>();
}

double eigenfunction_eval(const Filtration& f, int n, const FiniteAdele& x) {
    return eigenfunction_eval(f, n, x.is_zero() ? std::nullopt : std::optional<int>(x.norm_index()));
}

double eigenvalue(const Filtration& f, int n, double alpha) {
    return std::exp(alpha * f.log_psi(n));
}

}  // namespace adelic
