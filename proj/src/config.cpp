#include "adelic/config.hpp"

#include <sstream>

#include "adelic/errors.hpp"

namespace adelic {

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<std::uint64_t> parse_ratio_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("bad ratio '" + item + "' in filtration spec");
        }
    }
    return out;
}

}  // namespace

FiltrationPtr build_filtration(const FiltrationConfig& cfg) {
    if (cfg.type == "factorial") return Filtration::factorial(cfg.window);
    if (cfg.type == "prime_power") return Filtration::prime_power(cfg.p, cfg.window);
    if (cfg.type == "lcm") return Filtration::lcm(cfg.window);
    if (cfg.type == "custom") return Filtration::custom(cfg.ratios, cfg.extension, cfg.window);
    throw UsageError("unknown filtration type '" + cfg.type + "'");
}

FiltrationConfig parse_filtration_config(const nlohmann::json& j) {
    try {
        FiltrationConfig cfg;
        if (j.is_string()) return parse_filtration_spec(j.get<std::string>());
        read(j, "type", cfg.type);
        read(j, "p", cfg.p);
        read(j, "ratios", cfg.ratios);
        if (j.contains("extension")) {
            const auto ext = j.at("extension").get<std::string>();
            if (ext == "periodic") {
                cfg.extension = CustomExtension::periodic;
            } else if (ext == "reject") {
                cfg.extension = CustomExtension::reject;
            } else {
                throw UsageError("custom extension must be 'periodic' or 'reject'");
            }
        }
        if (j.contains("window")) {
            const auto w = j.at("window").get<std::vector<int>>();
            if (w.size() != 2 || w[0] > 0 || w[1] < 0) {
                throw UsageError("filtration window must be [n_min <= 0, n_max >= 0]");
            }
            cfg.window = {w[0], w[1]};
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed filtration config: ") + e.what());
    }
}

FiltrationConfig parse_filtration_spec(const std::string& spec) {
    FiltrationConfig cfg;
    const auto colon = spec.find(':');
    cfg.type = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (cfg.type == "prime_power") {
        const auto ps = parse_ratio_list(arg);
        if (ps.size() != 1) throw UsageError("prime_power needs one base, e.g. prime_power:2");
        cfg.p = ps[0];
    } else if (cfg.type == "custom") {
        cfg.ratios = parse_ratio_list(arg);
    } else if (!arg.empty() || (cfg.type != "factorial" && cfg.type != "lcm")) {
        throw UsageError("unknown filtration spec '" + spec + "'");
    }
    return cfg;
}

nlohmann::json to_json(const FiltrationConfig& cfg) {
    nlohmann::json j = {{"type", cfg.type}, {"window", {cfg.window.lo, cfg.window.hi}}};
    if (cfg.type == "prime_power") j["p"] = cfg.p;
    if (cfg.type == "custom") {
        j["ratios"] = cfg.ratios;
        j["extension"] = cfg.extension == CustomExtension::periodic ? "periodic" : "reject";
    }
    return j;
}

RunConfig parse_run_config(const nlohmann::json& j, RunConfig cfg) {
    if (!j.is_object()) throw UsageError("run config must be a JSON object");
    try {
        if (j.contains("filtration")) {
            cfg.filtration = parse_filtration_config(j.at("filtration"));
            cfg.filtration_given = true;
        }
        read(j, "alpha", cfg.alpha);
        read(j, "beta", cfg.beta);
        read(j, "t_grid", cfg.t_grid);
        read(j, "m_grid", cfg.m_grid);
        read(j, "x_grid", cfg.x_grid);
        read(j, "tolerance", cfg.tolerance);
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        read(j, "out", cfg.out);
        read(j, "draws", cfg.draws);
        read(j, "paths", cfg.paths);
        read(j, "times", cfg.times);
        read(j, "depth", cfg.depth);
        read(j, "workers", cfg.workers);
        read(j, "ball_index", cfg.ball_index);
        read(j, "half_width", cfg.half_width);
        read(j, "checks", cfg.checks);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed run config: ") + e.what());
    }
    return cfg;
}

void validate(const RunConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw UsageError("tolerance must be positive");
    if (!(cfg.alpha > 0.0)) throw UsageError("alpha must be positive");
    if (!(cfg.beta > 0.0 && cfg.beta <= 2.0)) throw UsageError("beta must lie in (0, 2]");
    if (cfg.t_grid.empty()) throw UsageError("t grid is empty");
    if (cfg.m_grid.empty()) throw UsageError("norm-index grid is empty");
    if (cfg.x_grid.empty()) throw UsageError("x grid is empty");
    for (double t : cfg.t_grid) {
        if (!(t > 0.0)) throw UsageError("t grid entries must be positive");
    }
    if (cfg.depth < 0) throw UsageError("digit depth must be nonnegative");
    if (cfg.workers == 0) throw UsageError("workers must be at least 1");
    if (!(cfg.half_width > 0.0)) throw UsageError("half width must be positive");
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j = {{"filtration", to_json(cfg.filtration)},
                        {"alpha", cfg.alpha},
                        {"beta", cfg.beta},
                        {"t_grid", cfg.t_grid},
                        {"m_grid", cfg.m_grid},
                        {"x_grid", cfg.x_grid},
                        {"tolerance", cfg.tolerance},
                        {"draws", cfg.draws},
                        {"paths", cfg.paths},
                        {"times", cfg.times},
                        {"depth", cfg.depth},
                        {"workers", cfg.workers},
                        {"ball_index", cfg.ball_index},
                        {"half_width", cfg.half_width}};
    if (cfg.seed) j["seed"] = *cfg.seed;
    return j;
}

}  // namespace adelic
