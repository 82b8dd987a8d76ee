#include "adelic/stats.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "adelic/errors.hpp"

namespace adelic {

namespace {

// Cell boundaries such that each merged cell has weight >= min_weight; a
// light remainder at the end joins the last full cell.
std::vector<std::size_t> merge_cells(std::span<const double> weight, double min_weight) {
    std::vector<std::size_t> ends;
    double acc = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
        acc += weight[i];
        if (acc >= min_weight) {
            ends.push_back(i + 1);
            acc = 0.0;
        }
    }
    if (ends.empty()) {
        ends.push_back(weight.size());
    } else if (ends.back() != weight.size()) {
        ends.back() = weight.size();
    }
    return ends;
}

double upper_p(double statistic, int dof) {
    if (dof <= 0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

ChiSquaredResult chi_squared_gof(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.empty()) {
        throw UsageError("goodness of fit needs equally sized nonempty tables");
    }
    const auto ends = merge_cells(expected, 5.0);
    ChiSquaredResult r;
    std::size_t begin = 0;
    for (auto end : ends) {
        double o = 0.0, e = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            o += observed[i];
            e += expected[i];
        }
        if (e > 0.0) r.statistic += (o - e) * (o - e) / e;
        begin = end;
    }
    r.bins = ends.size();
    r.dof = static_cast<int>(r.bins) - 1;
    r.p_value = upper_p(r.statistic, r.dof);
    return r;
}

ChiSquaredResult chi_squared_homogeneity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw UsageError("homogeneity test needs equally sized nonempty tables");
    }
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i];
        nb += b[i];
    }
    const double n = na + nb;
    // Smallest expected cell count is min(na, nb) * column / n.
    std::vector<double> weight(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) weight[i] = (a[i] + b[i]) * std::min(na, nb) / n;
    const auto ends = merge_cells(weight, 5.0);
    ChiSquaredResult r;
    std::size_t begin = 0;
    for (auto end : ends) {
        double ca = 0.0, cb = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            ca += a[i];
            cb += b[i];
        }
        const double col = ca + cb;
        if (col > 0.0) {
            const double ea = na * col / n;
            const double eb = nb * col / n;
            r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
        }
        begin = end;
    }
    r.bins = ends.size();
    r.dof = static_cast<int>(r.bins) - 1;
    r.p_value = upper_p(r.statistic, r.dof);
    return r;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw UsageError("total variation needs equally sized vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

nlohmann::json to_json(const ChiSquaredResult& r) {
    return {{"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}, {"bins", r.bins}};
}

}  // namespace adelic
