#include "icp/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace icp {

TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys, double alpha) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("paired_t_test: length mismatch");
    if (xs.size() < 2)
        throw std::invalid_argument("paired_t_test: need at least 2 pairs");

    const std::size_t n = xs.size();
    std::vector<double> diff(n);
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) {
        diff[i] = xs[i] - ys[i];
        mean += diff[i];
    }
    mean /= static_cast<double>(n);

    double ss = 0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult res;
    if (sd == 0) {
        if (mean == 0) return res; // identical samples
        res.t = mean > 0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
        res.p = 0;
        res.significant = true;
        return res;
    }

    res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    boost::math::students_t dist(static_cast<double>(n - 1));
    res.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(res.t)));
    res.significant = res.p < alpha;
    return res;
}

} // namespace icp
