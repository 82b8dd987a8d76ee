#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "adelic/filtration.hpp"

namespace adelic {

struct FiltrationConfig {
    std::string type = "factorial";  // factorial | prime_power | lcm | custom
    std::uint64_t p = 2;
    std::vector<std::uint64_t> ratios;
    CustomExtension extension = CustomExtension::periodic;
    IndexWindow window;
};

FiltrationPtr build_filtration(const FiltrationConfig& cfg);

// {"type": ..., "p": int?, "ratios": [int]?, "extension": "periodic" | "reject", "window": [lo, hi]}
FiltrationConfig parse_filtration_config(const nlohmann::json& j);

// Short forms for the command line: "factorial", "lcm", "prime_power:3",
// "custom:2,3,5".
FiltrationConfig parse_filtration_spec(const std::string& spec);

nlohmann::json to_json(const FiltrationConfig& cfg);

struct RunConfig {
    FiltrationConfig filtration;
    bool filtration_given = false;  // verify covers every built-in family otherwise
    double alpha = 1.0;
    double beta = 2.0;
    std::vector<double> t_grid{0.1, 1.0, 10.0};
    std::vector<int> m_grid{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
    std::vector<double> x_grid{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    double tolerance = 1e-12;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t draws = 100000;
    std::size_t paths = 1;
    std::vector<double> times{0.0, 0.5, 1.0};
    int depth = 24;
    unsigned workers = 1;
    int ball_index = 0;
    double half_width = 1.0;
    std::vector<std::string> checks;
};

// Fields absent from the JSON keep their defaults.
RunConfig parse_run_config(const nlohmann::json& j, RunConfig base = {});

// Throws UsageError on nonpositive tolerance, empty grids and similar.
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace adelic
