#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"

#include "adelic/adele.hpp"
#include "adelic/filtration.hpp"

namespace adelic {

using Complex = std::complex<double>;

// Norm index m of a chain norm e^{psi(m)}; empty for 0. Throws UsageError if
// the rational is not a chain value inside the window.
std::optional<int> norm_index_of(const Filtration& f, const Rational& norm);

// Integral of chi(-xi x) over B_n, with ||xi|| = e^{psi(m)} (empty m: xi = 0).
Rational char_integral_ball(const Filtration& f, int n, std::optional<int> xi_norm_index);
Rational char_integral_ball(const Filtration& f, int n, const Rational& xi_norm);

// Integral of chi(-xi x) over S_n.
Rational char_integral_sphere(const Filtration& f, int n, std::optional<int> xi_norm_index);
Rational char_integral_sphere(const Filtration& f, int n, const Rational& xi_norm);

/**
 * An element of D_k^l: supported in B_k, constant on cosets of B_l.
 *
 * Coefficients are indexed by the coset representatives of B_k / B_l, i.e. the
 * digit strings at positions -k .. -l-1 read as a mixed-radix integer with the
 * least significant digit at position -k.
 */
class TestFunction {
public:
    static constexpr std::size_t max_dimension = std::size_t{1} << 22;

    TestFunction(FiltrationPtr filtration, int k, int l, std::vector<Complex> coefficients);
    static TestFunction zero(FiltrationPtr filtration, int k, int l);
    static TestFunction ball_indicator(FiltrationPtr filtration, int k, int l, int ball_index);

    // Dimension e^{psi(k)} / e^{psi(l)}; throws ResourceError above max_dimension.
    static std::size_t dimension(const Filtration& f, int k, int l);

    const FiltrationPtr& filtration() const { return filtration_; }
    int support_index() const { return k_; }
    int constancy_index() const { return l_; }
    std::size_t dimension() const { return coeffs_.size(); }
    const std::vector<Complex>& coefficients() const { return coeffs_; }
    std::vector<Complex>& coefficients() { return coeffs_; }

    // Coset representative with the given index, truncated at position -l.
    FiniteAdele representative(std::size_t index) const;

    // Index of the coset containing x, or empty if x lies outside B_k.
    std::optional<std::size_t> coset_of(const FiniteAdele& x) const;

    Complex operator()(const FiniteAdele& x) const;

    // Mixed radices of the coset index, least significant first.
    std::vector<std::uint64_t> radices() const;

    nlohmann::json to_json() const;
    static TestFunction from_json(FiltrationPtr filtration, const nlohmann::json& j);

private:
    FiltrationPtr filtration_;
    int k_;
    int l_;
    std::vector<Complex> coeffs_;
};

// L^2 inner product <phi, psi> = int phi conj(psi) dx.
Complex inner_product(const TestFunction& phi, const TestFunction& psi);

// F phi(xi) = int phi(x) chi(xi x) dx, computed by a mixed-radix FFT. The
// result lives in D_{-l}^{-k}.
TestFunction fourier(const TestFunction& phi);

// Inverse transform phi(x) = int F phi(xi) chi(-x xi) dxi.
TestFunction inverse_fourier(const TestFunction& phi);

// Dense matrix of F on D_k^l built from exact character values; row-major
// with rows indexed by the cosets of B_{-l} / B_{-k}.
std::vector<Complex> fourier_matrix(const FiltrationPtr& filtration, int k, int l,
                                    std::size_t cap = 4096);

// Averages phi over every sphere S_m with l < m <= k.
TestFunction radialize(const TestFunction& phi);

/**
 * Finitely supported radial function sum_n c_n 1_{S_n}, used on the Fourier
 * side: the spectral action of D^alpha and of its semigroup is diagonal on it.
 */
class RadialProfile {
public:
    RadialProfile(FiltrationPtr filtration, std::map<int, Complex> coefficients);
    static RadialProfile sphere(FiltrationPtr filtration, int n);

    const FiltrationPtr& filtration() const { return filtration_; }
    const std::map<int, Complex>& coefficients() const { return coeffs_; }

    // Value at any xi with ||xi|| = e^{psi(m)}; xi = 0 gives 0.
    Complex operator()(std::optional<int> norm_index) const;

    RadialProfile apply_multiplier(const std::function<Complex(int)>& symbol) const;

    // c_n -> c_n e^{alpha psi(n)}: the symbol ||xi||^alpha of D^alpha.
    RadialProfile apply_symbol(double alpha) const;

    // c_n -> c_n exp(-t e^{alpha psi(n)}).
    RadialProfile apply_semigroup(double alpha, double t) const;

    // F^{-1}(profile) at any x with ||x|| = e^{psi(m)} (empty: x = 0).
    Complex inverse_at(std::optional<int> norm_index) const;

    // The profile as an element of D_k^l on the Fourier side.
    TestFunction to_test_function(int k, int l) const;

    int min_index() const;
    int max_index() const;

private:
    FiltrationPtr filtration_;
    std::map<int, Complex> coeffs_;
};

// F^{-1}(1_{S_n}) evaluated at x; real by symmetry.
double eigenfunction_eval(const Filtration& f, int n, const FiniteAdele& x);
double eigenfunction_eval(const Filtration& f, int n, std::optional<int> x_norm_index);

// Eigenvalue e^{alpha psi(n)} of D^alpha on F^{-1}(1_{S_n}).
double eigenvalue(const Filtration& f, int n, double alpha);

}  // namespace adelic
