#include "adelic/adelic_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adelic/errors.hpp"

namespace adelic {

AdelicKernel::AdelicKernel(HeatKernelFin finite, StableKernel real)
    : finite_(std::move(finite)), real_(real) {}

Certified AdelicKernel::eval(int norm_index, double x_real, double t) const {
    const Certified a = finite_.kernel_radial(norm_index, t);
    const Certified b = real_.eval(x_real, t);
    return {a.value * b.value,
            a.value * b.remainder + b.value * a.remainder + a.remainder * b.remainder,
            a.underflow_clamped || b.underflow_clamped};
}

Certified AdelicKernel::eval(const AdelePoint& x, double t) const {
    if (x.finite.filtration() != finite_.filtration()) {
        throw UsageError("point and kernel use different filtrations");
    }
    if (x.finite.is_zero()) {
        throw PrecisionError("finite part is zero to its truncation; its norm index is undetermined");
    }
    return eval(x.finite.norm_index(), x.real, t);
}

ProductNormalization AdelicKernel::normalization(double t) const {
    ProductNormalization n;
    n.t = t;
    const MassReport fin = finite_.mass_report(t);
    n.finite_mass = fin.total;
    n.finite_error = fin.series_remainder;
    const Certified re = real_.normalization(t);
    n.real_mass = re.value;
    n.real_error = re.remainder;
    n.total = n.finite_mass * n.real_mass;
    n.combined_error = n.finite_error + n.real_error + n.finite_error * n.real_error;
    return n;
}

nlohmann::json to_json(const ProductNormalization& n) {
    return {{"t", n.t},
            {"finite_mass", n.finite_mass},
            {"finite_error", n.finite_error},
            {"real_mass", n.real_mass},
            {"real_error", n.real_error},
            {"total", n.total},
            {"combined_error", n.combined_error}};
}

AdelePoint adelic_sample(const FiniteAdeleSampler& finite, const StableKernel& real, double t,
                         RandomStream& fin_rng, RandomStream& real_rng) {
    if (finite.time() != t) throw UsageError("finite sampler was built for a different time");
    return {real.sample(t, real_rng), finite.sample_increment(fin_rng)};
}

AdelicPathSimulator::AdelicPathSimulator(const AdelicKernel& kernel, std::vector<double> times,
                                         int depth)
    : finite_(kernel.finite(), std::move(times), depth), real_(&kernel.real()) {}

AdelicPathSample AdelicPathSimulator::run(RandomStream& rng, double start_real,
                                          std::optional<FiniteAdele> start_finite) const {
    RandomStream fin_rng = rng.split(0);
    RandomStream real_rng = rng.split(1);
    PathSample fin = finite_.run(fin_rng, std::move(start_finite));
    AdelicPathSample out;
    out.times = fin.times;
    out.finite = std::move(fin.states);
    out.reals.push_back(start_real);
    for (std::size_t i = 1; i < out.times.size(); ++i) {
        out.reals.push_back(out.reals.back() + real_->sample(out.times[i] - out.times[i - 1], real_rng));
    }
    return out;
}

std::string adelic_path_csv(const AdelicPathSample& path, std::size_t prefix_digits, bool header) {
    PathSample fin{path.times, path.finite};
    std::istringstream rows(path_csv(fin, prefix_digits, false));
    std::ostringstream os;
    os.precision(17);
    if (header) os << "t,norm_index,norm,gamma,digits_prefix,x_real\n";
    std::string line;
    for (std::size_t i = 0; std::getline(rows, line); ++i) os << line << ',' << path.reals[i] << '\n';
    return os.str();
}

EnsembleTrace adelic_ensemble(const AdelicKernel& kernel, const std::vector<double>& times,
                              std::size_t paths, std::uint64_t seed, unsigned workers) {
    const AdelicPathSimulator sim(kernel, times);
    EnsembleTrace trace;
    trace.paths = paths;
    trace.times = times.size();
    trace.norm_index.resize(paths * times.size());
    trace.real.resize(paths * times.size());
    parallel_jobs(paths, workers, RandomStream(seed), [&](std::size_t p, RandomStream& rng) {
        const AdelicPathSample s = sim.run(rng);
        for (std::size_t i = 0; i < times.size(); ++i) {
            trace.norm_index[p * times.size() + i] = norm_index_or_zero(s.finite[i]);
            trace.real[p * times.size() + i] = s.reals[i];
        }
    });
    return trace;
}

double real_cdf(const StableKernel& real, double x, double t) {
    if (x == 0.0) return 0.5;
    const double half = 0.5 * real.interval_mass(std::abs(x), t).value;
    return x > 0.0 ? 0.5 + half : 0.5 - half;
}

nlohmann::json dirac_limit_report(const AdelicKernel& kernel, const std::vector<StepPiece>& real_part,
                                  int ball_index, const std::vector<double>& t_sequence,
                                  std::optional<FiniteAdele> ball_center) {
    if (t_sequence.empty()) throw UsageError("Dirac limit needs a nonempty time sequence");
    const HeatKernelFin& fin = kernel.finite();
    const auto& f = fin.filtration();
    const FiniteAdele origin = FiniteAdele::zero(f, f->window().hi);
    const FiniteAdele center = ball_center ? *ball_center : origin;
    const bool origin_in_ball = Ball{center, ball_index}.contains(origin);

    double real_at_zero = 0.0;
    for (const auto& piece : real_part) {
        if (!(piece.lo <= piece.hi)) throw UsageError("step piece needs lo <= hi");
        if (piece.lo <= 0.0 && 0.0 <= piece.hi) real_at_zero += piece.height;
    }
    const double f0 = real_at_zero * (origin_in_ball ? 1.0 : 0.0);

    std::vector<double> ts(t_sequence);
    std::sort(ts.begin(), ts.end(), std::greater<>());
    nlohmann::json rows = nlohmann::json::array();
    bool bound_ok = true;
    bool finite_monotone = true;
    bool total_monotone = true;
    double prev_finite = std::numeric_limits<double>::infinity();
    double prev_total = std::numeric_limits<double>::infinity();
    for (double t : ts) {
        const double finite_integral = transition_prob_ball(fin, t, origin, center, ball_index);
        double real_integral = 0.0;
        for (const auto& piece : real_part) {
            real_integral += piece.height * (real_cdf(kernel.real(), piece.hi, t) -
                                             real_cdf(kernel.real(), piece.lo, t));
        }
        const double integral = finite_integral * real_integral;
        const double deviation = std::abs(integral - f0);
        const double finite_deviation = std::abs(finite_integral - (origin_in_ball ? 1.0 : 0.0));
        nlohmann::json row = {{"t", t},
                              {"finite_integral", finite_integral},
                              {"real_integral", real_integral},
                              {"integral", integral},
                              {"deviation", deviation},
                              {"finite_deviation", finite_deviation}};
        if (origin_in_ball) {
            const double bound = fin.exit_bound(ball_index, t);
            const bool ok = finite_deviation <= bound;
            bound_ok = bound_ok && ok;
            row["finite_bound"] = bound;
            row["finite_bound_ok"] = ok;
        }
        finite_monotone = finite_monotone && finite_deviation <= prev_finite;
        total_monotone = total_monotone && deviation <= prev_total;
        prev_finite = finite_deviation;
        prev_total = deviation;
        rows.push_back(row);
    }
    return {{"schema_version", 1},
            {"ball_index", ball_index},
            {"f_at_zero", f0},
            {"rows", rows},
            {"finite_bound_ok", bound_ok},
            {"finite_deviation_monotone", finite_monotone},
            {"deviation_monotone", total_monotone}};
}

}  // namespace adelic
