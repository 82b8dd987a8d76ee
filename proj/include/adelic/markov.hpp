#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "adelic/adele.hpp"
#include "adelic/heat_kernel.hpp"
#include "adelic/random.hpp"
#include "adelic/stats.hpp"

namespace adelic {

/**
 * Exact sampler for the law Z(x, t) dx on A_f.
 *
 * The shell index is drawn by inverse CDF over the shell masses of a window
 * whose two certified tails are each below tolerance / 2; draws are
 * conditioned on that window. The point is then Haar-uniform on the sphere,
 * known to `depth` digit positions past the leading digit.
 */
class FiniteAdeleSampler {
public:
    static constexpr int default_depth = 24;

    FiniteAdeleSampler(const HeatKernelFin& kernel, double t, int depth = default_depth,
                       std::optional<double> tolerance = std::nullopt);

    double time() const { return t_; }
    int depth() const { return depth_; }
    const ShellWindow& window() const { return window_; }
    const FiltrationPtr& filtration() const { return filtration_; }

    // Shell masses over the window, normalized to sum to one.
    const std::vector<double>& shell_probabilities() const { return probs_; }

    int sample_norm_index(RandomStream& rng) const;
    FiniteAdele sample_increment(RandomStream& rng) const;

private:
    FiltrationPtr filtration_;
    double t_;
    int depth_;
    ShellWindow window_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

struct PathSample {
    std::vector<double> times;
    std::vector<FiniteAdele> states;
};

// Paths on a fixed time grid. Samplers for each step length are built once
// and shared by every run.
class PathSimulator {
public:
    PathSimulator(const HeatKernelFin& kernel, std::vector<double> times,
                  int depth = FiniteAdeleSampler::default_depth);

    const std::vector<double>& times() const { return times_; }
    const FiniteAdeleSampler& step_sampler(std::size_t step) const { return samplers_[step_index_[step]]; }

    // X_{t_0} = start (zero when absent) plus independent increments.
    PathSample run(RandomStream& rng, std::optional<FiniteAdele> start = std::nullopt) const;

private:
    FiltrationPtr filtration_;
    std::vector<double> times_;
    std::vector<FiniteAdeleSampler> samplers_;
    std::vector<std::size_t> step_index_;
};

// X_{t_0} = start (zero when absent) and independent increments with laws
// Z(., t_{i+1} - t_i). Times must be strictly increasing with t_0 >= 0.
PathSample simulate_path(const HeatKernelFin& kernel, const std::vector<double>& times,
                         RandomStream& rng, std::optional<FiniteAdele> start = std::nullopt,
                         int depth = FiniteAdeleSampler::default_depth);

// Norm index of a state, or zero_index for a state that is zero to its truncation.
inline constexpr int zero_index = std::numeric_limits<int>::min();
int norm_index_or_zero(const FiniteAdele& x);

// CSV "t,norm_index,norm,gamma,digits_prefix" with one row per time.
std::string path_csv(const PathSample& path, std::size_t prefix_digits = 8, bool header = true);

// Runs count independent jobs; job i draws from root.split(i), so results do
// not depend on the worker count.
void parallel_jobs(std::size_t count, unsigned workers, const RandomStream& root,
                   const std::function<void(std::size_t, RandomStream&)>& job);

// Shell counts of `draws` increments over the sampler window.
std::vector<double> shell_counts(const FiniteAdeleSampler& sampler, std::size_t draws,
                                 std::uint64_t seed, unsigned workers = 1);

struct ShellFit {
    std::size_t draws = 0;
    std::vector<double> observed;
    std::vector<double> expected;  // draws * shell probability
    ChiSquaredResult chi2;
    double total_variation = 0.0;
};

ShellFit shell_fit(const FiniteAdeleSampler& sampler, std::size_t draws, std::uint64_t seed,
                   unsigned workers = 1);

nlohmann::json to_json(const ShellFit& fit, const ShellWindow& window);

}  // namespace adelic
