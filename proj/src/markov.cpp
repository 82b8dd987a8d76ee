#include "adelic/markov.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "adelic/errors.hpp"

namespace adelic {

FiniteAdeleSampler::FiniteAdeleSampler(const HeatKernelFin& kernel, double t, int depth,
                                       std::optional<double> tolerance)
    : filtration_(kernel.filtration()), t_(t), depth_(depth) {
    if (depth < 0) throw UsageError("digit depth must be nonnegative");
    window_ = kernel.shell_window(t, 0.5 * tolerance.value_or(kernel.tolerance()));
    CompensatedSum total;
    for (int m = window_.lo; m <= window_.hi; ++m) {
        probs_.push_back(kernel.shell_mass(m, t).value);
        total.add(probs_.back());
    }
    const double norm = total.value();
    double acc = 0.0;
    for (auto& p : probs_) {
        p /= norm;
        acc += p;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
}

int FiniteAdeleSampler::sample_norm_index(RandomStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto offset = std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                 static_cast<std::ptrdiff_t>(cumulative_.size()) - 1);
    return window_.lo + static_cast<int>(offset);
}

FiniteAdele FiniteAdeleSampler::sample_increment(RandomStream& rng) const {
    const int m = sample_norm_index(rng);
    const int truncation = std::min(-m + depth_ + 1, filtration_->window().hi);
    return sample_uniform_sphere(filtration_, m, truncation, rng);
}

PathSimulator::PathSimulator(const HeatKernelFin& kernel, std::vector<double> times, int depth)
    : filtration_(kernel.filtration()), times_(std::move(times)) {
    if (times_.empty()) throw UsageError("path needs at least one time");
    if (!(times_.front() >= 0.0)) throw UsageError("path times must start at t_0 >= 0");
    std::map<double, std::size_t> by_step;
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) throw UsageError("path times must be strictly increasing");
        const double dt = times_[i] - times_[i - 1];
        auto it = by_step.find(dt);
        if (it == by_step.end()) {
            it = by_step.emplace(dt, samplers_.size()).first;
            samplers_.emplace_back(kernel, dt, depth);
        }
        step_index_.push_back(it->second);
    }
}

PathSample PathSimulator::run(RandomStream& rng, std::optional<FiniteAdele> start) const {
    FiniteAdele state = start ? *start : FiniteAdele::zero(filtration_, filtration_->window().hi);
    if (state.filtration() != filtration_) {
        throw UsageError("start point and kernel use different filtrations");
    }
    PathSample path;
    path.times = times_;
    path.states.reserve(times_.size());
    path.states.push_back(state);
    for (std::size_t step = 0; step + 1 < times_.size(); ++step) {
        state = state + step_sampler(step).sample_increment(rng);
        path.states.push_back(state);
    }
    return path;
}

PathSample simulate_path(const HeatKernelFin& kernel, const std::vector<double>& times,
                         RandomStream& rng, std::optional<FiniteAdele> start, int depth) {
    return PathSimulator(kernel, times, depth).run(rng, std::move(start));
}

int norm_index_or_zero(const FiniteAdele& x) { return x.is_zero() ? zero_index : x.norm_index(); }

std::string path_csv(const PathSample& path, std::size_t prefix_digits, bool header) {
    std::ostringstream os;
    os.precision(17);
    if (header) os << "t,norm_index,norm,gamma,digits_prefix\n";
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const FiniteAdele& x = path.states[i];
        os << path.times[i] << ',';
        if (x.is_zero()) {
            os << ",0,inf,";
        } else {
            os << x.norm_index() << ',' << x.filtration()->psi_double(x.norm_index()) << ','
               << *x.order() << ',';
            const auto digits = x.digits();
            for (std::size_t j = 0; j < std::min(prefix_digits, digits.size()); ++j) {
                if (j) os << ';';
                os << digits[j];
            }
        }
        os << '\n';
    }
    return os.str();
}

void parallel_jobs(std::size_t count, unsigned workers, const RandomStream& root,
                   const std::function<void(std::size_t, RandomStream&)>& job) {
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            RandomStream rng = root.split(i);
            job(i, rng);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next++; i < count; i = next++) {
                    RandomStream rng = root.split(i);
                    job(i, rng);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> shell_counts(const FiniteAdeleSampler& sampler, std::size_t draws,
                                 std::uint64_t seed, unsigned workers) {
    constexpr std::size_t block = 8192;
    const std::size_t blocks = (draws + block - 1) / block;
    const std::size_t shells = sampler.shell_probabilities().size();
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(shells));
    const int lo = sampler.window().lo;
    parallel_jobs(blocks, workers, RandomStream(seed), [&](std::size_t b, RandomStream& rng) {
        const std::size_t n = std::min(block, draws - b * block);
        auto& counts = partial[b];
        for (std::size_t i = 0; i < n; ++i) {
            const FiniteAdele x = sampler.sample_increment(rng);
            counts[static_cast<std::size_t>(x.norm_index() - lo)] += 1.0;
        }
    });
    std::vector<double> total(shells);
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < shells; ++i) total[i] += p[i];
    }
    return total;
}

ShellFit shell_fit(const FiniteAdeleSampler& sampler, std::size_t draws, std::uint64_t seed,
                   unsigned workers) {
    ShellFit fit;
    fit.draws = draws;
    fit.observed = shell_counts(sampler, draws, seed, workers);
    const auto& probs = sampler.shell_probabilities();
    std::vector<double> freq(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        fit.expected.push_back(static_cast<double>(draws) * probs[i]);
        freq[i] = fit.observed[i] / static_cast<double>(draws);
    }
    fit.chi2 = chi_squared_gof(fit.observed, fit.expected);
    fit.total_variation = total_variation(freq, probs);
    return fit;
}

nlohmann::json to_json(const ShellFit& fit, const ShellWindow& window) {
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t i = 0; i < fit.observed.size(); ++i) {
        table.push_back({{"norm_index", window.lo + static_cast<int>(i)},
                         {"observed", fit.observed[i]},
                         {"expected", fit.expected[i]}});
    }
    return {{"draws", fit.draws},
            {"window", {window.lo, window.hi}},
            {"shells", table},
            {"chi_squared", to_json(fit.chi2)},
            {"total_variation", fit.total_variation}};
}

}  // namespace adelic
