#include <cmath>

#include "doctest.h"

#include "adelic/stats.hpp"

using namespace adelic;

TEST_SUITE("stats") {

TEST_CASE("chi-squared with two degrees of freedom") {
    // statistic 10 on 2 dof has survival exp(-5)
    const std::vector<double> obs{10, 20, 30}, exp{20, 20, 20};
    const auto r = chi_squared_gof(obs, exp);
    CHECK(r.statistic == doctest::Approx(10.0));
    CHECK(r.dof == 2);
    CHECK(r.p_value == doctest::Approx(std::exp(-5.0)).epsilon(1e-10));
}

TEST_CASE("sparse cells are merged") {
    const std::vector<double> obs{1, 2, 50, 47, 0}, exp{1.5, 1.5, 50, 46, 1};
    const auto r = chi_squared_gof(obs, exp);
    // {1.5, 1.5, 50} and {46, 1}
    CHECK(r.bins == 2);
    CHECK(r.dof == 1);
    CHECK(r.statistic == doctest::Approx(0.0));
}

TEST_CASE("homogeneity of identical tables") {
    const std::vector<double> a{30, 40, 30};
    const auto r = chi_squared_homogeneity(a, a);
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("total variation") {
    const std::vector<double> p{0.5, 0.5, 0.0}, q{0.25, 0.25, 0.5};
    CHECK(total_variation(p, q) == doctest::Approx(0.5));
    CHECK(total_variation(p, p) == 0.0);
}

}
