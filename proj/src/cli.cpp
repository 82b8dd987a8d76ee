#include "adelic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "adelic/adelic_kernel.hpp"
#include "adelic/config.hpp"
#include "adelic/errors.hpp"
#include "adelic/heat_kernel.hpp"
#include "adelic/markov.hpp"
#include "adelic/stable.hpp"
#include "adelic/stats.hpp"
#include "adelic/verify.hpp"

namespace adelic {

namespace {

using nlohmann::json;

// Raw flag values; an option only overrides the config when it was given.
struct Flags {
    std::string config;
    std::string filtration;
    std::string out;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> t_grid;
    std::vector<int> m_grid;
    std::vector<double> x_grid;
    std::vector<double> times;
    std::size_t draws = 0;
    std::size_t paths = 0;
    int depth = 0;
    unsigned workers = 0;
    int ball_index = 0;
    double half_width = 0.0;
    std::vector<std::string> checks;
    std::map<std::string, CLI::Option*> given;
};

void add_flags(CLI::App& cmd, Flags& f) {
    auto& g = f.given;
    g["config"] = cmd.add_option("--config", f.config, "JSON run config; flags override it");
    g["filtration"] = cmd.add_option("--filtration", f.filtration,
                                     "factorial | lcm | prime_power:P | custom:R1,R2,...");
    g["out"] = cmd.add_option("--out", f.out, "write the table here; the summary goes to stdout");
    g["seed"] = cmd.add_option("--seed", f.seed);
    g["tolerance"] = cmd.add_option("--tolerance", f.tolerance);
    g["alpha"] = cmd.add_option("--alpha", f.alpha);
    g["beta"] = cmd.add_option("--beta", f.beta);
    g["t_grid"] = cmd.add_option("--t-grid", f.t_grid)->delimiter(',');
    g["m_grid"] = cmd.add_option("--m-grid", f.m_grid)->delimiter(',');
    g["x_grid"] = cmd.add_option("--x-grid", f.x_grid)->delimiter(',');
    g["times"] = cmd.add_option("--times", f.times, "path time grid")->delimiter(',');
    g["draws"] = cmd.add_option("--draws", f.draws);
    g["paths"] = cmd.add_option("--paths", f.paths);
    g["depth"] = cmd.add_option("--depth", f.depth, "digit positions kept past the leading digit");
    g["workers"] = cmd.add_option("--workers", f.workers);
    g["ball_index"] = cmd.add_option("--ball-index", f.ball_index);
    g["half_width"] = cmd.add_option("--half-width", f.half_width);
    g["checks"] = cmd.add_option("--check", f.checks, "run only the named verification check");
}

bool given(const Flags& f, const std::string& key) { return f.given.at(key)->count() > 0; }

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    if (given(f, "config")) {
        std::ifstream in(f.config);
        if (!in) throw UsageError("cannot read config file '" + f.config + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw UsageError("config file is not valid JSON: " + std::string(e.what()));
        }
        cfg = parse_run_config(j, cfg);
    }
    if (given(f, "filtration")) {
        const IndexWindow window = cfg.filtration.window;
        cfg.filtration = parse_filtration_spec(f.filtration);
        cfg.filtration.window = window;
        cfg.filtration_given = true;
    }
    if (given(f, "out")) cfg.out = f.out;
    if (given(f, "seed")) cfg.seed = f.seed;
    if (given(f, "tolerance")) cfg.tolerance = f.tolerance;
    if (given(f, "alpha")) cfg.alpha = f.alpha;
    if (given(f, "beta")) cfg.beta = f.beta;
    if (given(f, "t_grid")) cfg.t_grid = f.t_grid;
    if (given(f, "m_grid")) cfg.m_grid = f.m_grid;
    if (given(f, "x_grid")) cfg.x_grid = f.x_grid;
    if (given(f, "times")) cfg.times = f.times;
    if (given(f, "draws")) cfg.draws = f.draws;
    if (given(f, "paths")) cfg.paths = f.paths;
    if (given(f, "depth")) cfg.depth = f.depth;
    if (given(f, "workers")) cfg.workers = f.workers;
    if (given(f, "ball_index")) cfg.ball_index = f.ball_index;
    if (given(f, "half_width")) cfg.half_width = f.half_width;
    if (given(f, "checks")) cfg.checks = f.checks;
    validate(cfg);
    return cfg;
}

std::uint64_t require_seed(const RunConfig& cfg) {
    if (!cfg.seed) throw UsageError("this command samples and needs --seed");
    return *cfg.seed;
}

// Writes the table to --out (summary to `out`) or the table to `out` and the
// summary to `err`.
void emit(const RunConfig& cfg, const std::string& table, const json& summary, std::ostream& out,
          std::ostream& err) {
    if (!cfg.out.empty()) {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) throw UsageError("cannot write '" + cfg.out + "'");
        file << table;
        out << summary.dump(2) << '\n';
    } else {
        out << table;
        err << summary.dump(2) << '\n';
    }
}

std::ostringstream table_stream() {
    std::ostringstream os;
    os.precision(17);
    return os;
}

json header(const char* command, const RunConfig& cfg) {
    return {{"schema_version", 1}, {"command", command}, {"config", to_json(cfg)}};
}

int cmd_kernel(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const HeatKernelFin kernel(build_filtration(cfg.filtration), cfg.alpha, cfg.tolerance);
    auto os = table_stream();
    os << "t,m,radius,Z,lower_bound_check,upper_bound_check,shell_mass\n";
    json rows = json::array();
    std::size_t violations = 0;
    for (double t : cfg.t_grid) {
        for (int m : cfg.m_grid) {
            const BoundReport r = kernel.pointwise_bound_check(m, t);
            const double mass = kernel.shell_mass(m, t).value;
            os << t << ',' << m << ',' << kernel.filtration()->psi_double(m) << ',' << r.value << ','
               << (r.lower_ok ? "pass" : "fail") << ',' << (r.upper_ok ? "pass" : "fail") << ','
               << mass << '\n';
            if (!(r.lower_ok && r.upper_ok)) ++violations;
            rows.push_back(to_json(r));
        }
    }
    json summary = header("kernel", cfg);
    summary["bounds"] = rows;
    summary["violations"] = violations;
    summary["passed"] = violations == 0;
    emit(cfg, os.str(), summary, out, err);
    return violations == 0 ? exit_ok : exit_verification_failed;
}

int cmd_shells(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const HeatKernelFin kernel(build_filtration(cfg.filtration), cfg.alpha, cfg.tolerance);
    auto os = table_stream();
    os << "t,m,radius,shell_mass,cumulative\n";
    json reports = json::array();
    for (double t : cfg.t_grid) {
        for (int m : cfg.m_grid) {
            os << t << ',' << m << ',' << kernel.filtration()->psi_double(m) << ','
               << kernel.shell_mass(m, t).value << ',' << kernel.radial_cdf(m, t).value << '\n';
        }
        reports.push_back(to_json(kernel.mass_report(t)));
    }
    json summary = header("shells", cfg);
    summary["mass_reports"] = reports;
    emit(cfg, os.str(), summary, out, err);
    return exit_ok;
}

int cmd_cdf(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const HeatKernelFin kernel(build_filtration(cfg.filtration), cfg.alpha, cfg.tolerance);
    auto os = table_stream();
    os << "t,k,radius,cdf,tail,exit_bound\n";
    std::size_t violations = 0;
    for (double t : cfg.t_grid) {
        for (int k : cfg.m_grid) {
            const double tail = kernel.radial_tail(k, t).value;
            const double bound = kernel.exit_bound(k, t);
            if (tail > bound) ++violations;
            os << t << ',' << k << ',' << kernel.filtration()->psi_double(k) << ','
               << kernel.radial_cdf(k, t).value << ',' << tail << ',' << bound << '\n';
        }
    }
    json summary = header("cdf", cfg);
    summary["exit_bound_violations"] = violations;
    emit(cfg, os.str(), summary, out, err);
    return violations == 0 ? exit_ok : exit_verification_failed;
}

// Increments at t = first entry of the t grid. Blocks of draws use the same
// streams as shell_counts, so the rows and the fit describe the same sample.
int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = require_seed(cfg);
    const HeatKernelFin kernel(build_filtration(cfg.filtration), cfg.alpha, cfg.tolerance);
    const double t = cfg.t_grid.front();
    const FiniteAdeleSampler sampler(kernel, t, cfg.depth);
    constexpr std::size_t block = 8192;
    const std::size_t blocks = (cfg.draws + block - 1) / block;
    std::vector<PathSample> parts(blocks);
    parallel_jobs(blocks, cfg.workers, RandomStream(seed), [&](std::size_t b, RandomStream& rng) {
        const std::size_t n = std::min(block, cfg.draws - b * block);
        for (std::size_t i = 0; i < n; ++i) {
            parts[b].times.push_back(t);
            parts[b].states.push_back(sampler.sample_increment(rng));
        }
    });
    std::string table = "t,norm_index,norm,gamma,digits_prefix\n";
    ShellFit fit;
    fit.draws = cfg.draws;
    const auto& probs = sampler.shell_probabilities();
    fit.observed.assign(probs.size(), 0.0);
    for (const auto& part : parts) {
        table += path_csv(part, 8, false);
        for (const auto& x : part.states) {
            fit.observed[static_cast<std::size_t>(x.norm_index() - sampler.window().lo)] += 1.0;
        }
    }
    std::vector<double> freq(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        fit.expected.push_back(static_cast<double>(cfg.draws) * probs[i]);
        freq[i] = fit.observed[i] / static_cast<double>(cfg.draws);
    }
    fit.chi2 = chi_squared_gof(fit.observed, fit.expected);
    fit.total_variation = total_variation(freq, probs);
    json summary = header("sample", cfg);
    summary["t"] = t;
    summary["fit"] = to_json(fit, sampler.window());
    emit(cfg, table, summary, out, err);
    return exit_ok;
}

// Path 0 goes to the table; with several paths the summary compares the
// final-time shell frequencies against the exact law of X_T - X_0.
int cmd_path(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = require_seed(cfg);
    const HeatKernelFin kernel(build_filtration(cfg.filtration), cfg.alpha, cfg.tolerance);
    if (cfg.times.size() < 2) throw UsageError("a path needs at least two times");
    const PathSimulator sim(kernel, cfg.times, cfg.depth);
    std::vector<int> final_index(cfg.paths);
    std::string table;
    parallel_jobs(cfg.paths, cfg.workers, RandomStream(seed), [&](std::size_t p, RandomStream& rng) {
        const PathSample s = sim.run(rng);
        final_index[p] = norm_index_or_zero(s.states.back());
        if (p == 0) table = path_csv(s);
    });
    json summary = header("path", cfg);
    if (cfg.paths > 1) {
        const FiniteAdeleSampler exact(kernel, cfg.times.back() - cfg.times.front(), cfg.depth);
        const ShellWindow& w = exact.window();
        const auto& probs = exact.shell_probabilities();
        std::vector<double> observed(probs.size(), 0.0), expected;
        std::size_t outside = 0;
        for (int m : final_index) {
            // Cancellation can push a sum below the window; it is counted at the edge.
            const int clipped = m == zero_index ? w.lo : std::clamp(m, w.lo, w.hi);
            if (clipped != m) ++outside;
            observed[static_cast<std::size_t>(clipped - w.lo)] += 1.0;
        }
        for (double p : probs) expected.push_back(p * static_cast<double>(cfg.paths));
        json shells = json::array();
        for (std::size_t i = 0; i < probs.size(); ++i) {
            shells.push_back({{"norm_index", w.lo + static_cast<int>(i)},
                              {"observed", observed[i]},
                              {"expected", expected[i]}});
        }
        summary["ensemble"] = {{"paths", cfg.paths},
                               {"final_time", cfg.times.back()},
                               {"shells", shells},
                               {"outside_window", outside},
                               {"chi_squared", to_json(chi_squared_gof(observed, expected))}};
    }
    emit(cfg, table, summary, out, err);
    return exit_ok;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const json report = run_verification(cfg);
    if (!cfg.out.empty()) {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) throw UsageError("cannot write '" + cfg.out + "'");
        file << report.dump(2) << '\n';
    }
    out << report.dump(2) << '\n';
    return report.at("passed").get<bool>() ? exit_ok : exit_verification_failed;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto f = build_filtration(cfg.filtration);
    auto os = table_stream();
    os << "n,alpha,t,eigenvalue,multiplier,max_abs_error,max_expected\n";
    for (double t : cfg.t_grid) {
        for (int n : cfg.m_grid) {
            const double lambda = eigenvalue(*f, n, cfg.alpha);
            const EigenpairError e = eigenpair_fft_error(f, n, cfg.alpha, t);
            os << n << ',' << cfg.alpha << ',' << t << ',' << lambda << ',' << std::exp(-t * lambda)
               << ',' << e.max_abs << ',' << e.max_expected << '\n';
        }
    }
    emit(cfg, os.str(), header("spectrum", cfg), out, err);
    return exit_ok;
}

int cmd_arch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const StableKernel k(cfg.beta);
    double u_max = 1.0;
    for (double x : cfg.x_grid) {
        for (double t : cfg.t_grid) u_max = std::max(u_max, std::abs(x) * std::pow(t, -1.0 / cfg.beta));
    }
    const double c = k.fitted_constant(u_max);
    auto os = table_stream();
    os << "x,t,beta,Z_inf,bound_rhs\n";
    std::size_t violations = 0;
    for (double t : cfg.t_grid) {
        for (double x : cfg.x_grid) {
            const double z = k.eval(x, t).value;
            const double rhs = c * StableKernel::bound_shape(cfg.beta, x, t);
            if (z > rhs) ++violations;
            os << x << ',' << t << ',' << cfg.beta << ',' << z << ',' << rhs << '\n';
        }
    }
    json summary = header("arch", cfg);
    summary["fitted_constant"] = c;
    summary["u_max"] = u_max;
    summary["bound_violations"] = violations;
    if (cfg.seed) {
        json moments = json::array();
        RandomStream root(*cfg.seed);
        for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
            const double t = cfg.t_grid[i];
            RandomStream rng = root.split(i);
            std::vector<double> xs(cfg.draws);
            for (auto& x : xs) x = k.sample(t, rng);
            std::sort(xs.begin(), xs.end());
            auto q = [&](double p) { return xs[static_cast<std::size_t>(p * double(xs.size() - 1))]; };
            double mean = 0.0, sq = 0.0;
            for (double x : xs) {
                mean += x;
                sq += x * x;
            }
            mean /= double(xs.size());
            moments.push_back({{"t", t},
                               {"draws", xs.size()},
                               {"mean", mean},
                               {"variance", sq / double(xs.size()) - mean * mean},
                               {"median", q(0.5)},
                               {"iqr", q(0.75) - q(0.25)}});
        }
        summary["sampler"] = moments;
    }
    emit(cfg, os.str(), summary, out, err);
    return violations == 0 ? exit_ok : exit_verification_failed;
}

int cmd_adelic(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const AdelicKernel k(HeatKernelFin(build_filtration(cfg.filtration), cfg.alpha, cfg.tolerance),
                         StableKernel(cfg.beta));
    auto os = table_stream();
    os << "t,x_real,norm_index,Z_A\n";
    json norms = json::array();
    bool ok = true;
    for (double t : cfg.t_grid) {
        for (double x : cfg.x_grid) {
            for (int m : cfg.m_grid) os << t << ',' << x << ',' << m << ',' << k.eval(m, x, t).value << '\n';
        }
        const ProductNormalization n = k.normalization(t);
        ok = ok && std::abs(n.total - 1.0) <= std::max(n.combined_error, 1e-10);
        norms.push_back(to_json(n));
    }
    json summary = header("adelic", cfg);
    summary["normalization"] = norms;
    summary["normalization_ok"] = ok;
    emit(cfg, os.str(), summary, out, err);
    return ok ? exit_ok : exit_verification_failed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heat kernels and jump processes on adele rings"};
    app.require_subcommand(1);
    using Handler = std::function<int(const RunConfig&, std::ostream&, std::ostream&)>;
    const std::vector<std::tuple<const char*, const char*, Handler>> commands{
        {"kernel", "kernel values with bound checks", cmd_kernel},
        {"shells", "shell masses and the radial CDF", cmd_shells},
        {"cdf", "ball probabilities and exit bounds", cmd_cdf},
        {"sample", "exact increment draws with a shell fit", cmd_sample},
        {"path", "process paths on a time grid", cmd_path},
        {"verify", "run the verification suite", cmd_verify},
        {"spectrum", "eigenpair table from the FFT", cmd_spectrum},
        {"arch", "real stable kernel and its bound", cmd_arch},
        {"adelic", "product kernel on the full adeles", cmd_adelic},
    };
    std::vector<Flags> flags(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(std::get<0>(commands[i]), std::get<1>(commands[i]));
        add_flags(*sub, flags[i]);
        subs.push_back(sub);
    }
    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            std::ostringstream msg, diag;
            const int code = app.exit(e, msg, diag);
            out << msg.str();
            err << diag.str();
            return code == 0 ? exit_ok : exit_usage;
        }
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (subs[i]->parsed()) return std::get<2>(commands[i])(resolve(flags[i]), out, err);
        }
        return exit_usage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const PrecisionError& e) {
        err << "precision error: " << e.what() << '\n';
        return exit_precision;
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << '\n';
        return exit_precision;
    }
}

}  // namespace adelic
