#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace adelic {

struct ChiSquaredResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;  // after merging sparse cells
};

// Pearson goodness of fit. Adjacent cells are merged until every expected
// count is at least 5.
ChiSquaredResult chi_squared_gof(std::span<const double> observed, std::span<const double> expected);

// Two-sample homogeneity test on count tables over the same cells.
ChiSquaredResult chi_squared_homogeneity(std::span<const double> a, std::span<const double> b);

// (1/2) sum |p_i - q_i| for two probability vectors.
double total_variation(std::span<const double> p, std::span<const double> q);

nlohmann::json to_json(const ChiSquaredResult& r);

}  // namespace adelic
