#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "adelic/adele.hpp"
#include "adelic/heat_kernel.hpp"
#include "adelic/markov.hpp"
#include "adelic/stable.hpp"

namespace adelic {

// A point (x_inf, x_f) of R x A_f.
struct AdelePoint {
    double real = 0.0;
    FiniteAdele finite;
};

struct ProductNormalization {
    double t = 0.0;
    double finite_mass = 0.0;
    double finite_error = 0.0;
    double real_mass = 0.0;
    double real_error = 0.0;
    double total = 0.0;
    double combined_error = 0.0;
};

// Z_A(x, t) = Z_f(x_f, t) Z_inf(x_inf, t), the kernel of D^alpha + D^beta.
class AdelicKernel {
public:
    AdelicKernel(HeatKernelFin finite, StableKernel real);

    const HeatKernelFin& finite() const { return finite_; }
    const StableKernel& real() const { return real_; }

    // Error of the product: a db + b da + da db.
    Certified eval(const AdelePoint& x, double t) const;
    Certified eval(int norm_index, double x_real, double t) const;

    ProductNormalization normalization(double t) const;

private:
    HeatKernelFin finite_;
    StableKernel real_;
};

nlohmann::json to_json(const ProductNormalization& n);

// Draws from Z_A(., t): the finite part from fin_rng, the real part from real_rng.
AdelePoint adelic_sample(const FiniteAdeleSampler& finite, const StableKernel& real, double t,
                         RandomStream& fin_rng, RandomStream& real_rng);

struct AdelicPathSample {
    std::vector<double> times;
    std::vector<double> reals;
    std::vector<FiniteAdele> finite;
};

// Path of the product process; each run splits its stream into a finite
// stream (index 0) and a real stream (index 1).
class AdelicPathSimulator {
public:
    AdelicPathSimulator(const AdelicKernel& kernel, std::vector<double> times,
                        int depth = FiniteAdeleSampler::default_depth);

    const std::vector<double>& times() const { return finite_.times(); }
    AdelicPathSample run(RandomStream& rng, double start_real = 0.0,
                         std::optional<FiniteAdele> start_finite = std::nullopt) const;

private:
    PathSimulator finite_;
    const StableKernel* real_;
};

// CSV "t,norm_index,norm,gamma,digits_prefix,x_real".
std::string adelic_path_csv(const AdelicPathSample& path, std::size_t prefix_digits = 8,
                            bool header = true);

// Norm indices and real parts of many independent paths, row-major by path.
struct EnsembleTrace {
    std::size_t paths = 0;
    std::size_t times = 0;
    std::vector<int> norm_index;  // zero_index when the state is zero
    std::vector<double> real;
};

EnsembleTrace adelic_ensemble(const AdelicKernel& kernel, const std::vector<double>& times,
                              std::size_t paths, std::uint64_t seed, unsigned workers = 1);

// Step function sum_i h_i 1_{[lo_i, hi_i]} on R.
struct StepPiece {
    double lo = 0.0;
    double hi = 0.0;
    double height = 1.0;
};

// int Z_A(x, t) f(x) dx for f = (step function) x 1_{center + B_l}, along a
// sequence of times, with its deviation from f(0).
nlohmann::json dirac_limit_report(const AdelicKernel& kernel, const std::vector<StepPiece>& real_part,
                                  int ball_index, const std::vector<double>& t_sequence,
                                  std::optional<FiniteAdele> ball_center = std::nullopt);

// P(X_t <= x) for the real factor, from its symmetric interval masses.
double real_cdf(const StableKernel& real, double x, double t);

}  // namespace adelic
