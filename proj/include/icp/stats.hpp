#pragma once

#include <span>

namespace icp {

struct TTestResult {
    double t = 0;
    double p = 1;
    bool significant = false;
};

// Two-tailed paired Student's t-test on elementwise differences.
// All-zero differences: t = 0, not significant. Zero variance with a nonzero
// mean difference: t = +/-inf, p = 0, significant.
TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys, double alpha);

} // namespace icp
