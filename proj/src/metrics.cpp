#include "icp/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace icp {

namespace {

void check(const BatchOutcome& batch) {
    if (batch.sets.empty() || batch.sets.size() != batch.truths.size())
        throw std::invalid_argument("batch: need equally many sets and truths, at least one");
}

} // namespace

double one_c(const BatchOutcome& batch) {
    check(batch);
    std::size_t singletons = 0;
    for (const auto& s : batch.sets)
        if (s.size() == 1) ++singletons;
    return static_cast<double>(singletons) / static_cast<double>(batch.sets.size());
}

double avg_c(const BatchOutcome& batch) {
    check(batch);
    std::size_t total = 0;
    for (const auto& s : batch.sets) total += s.size();
    return static_cast<double>(total) / static_cast<double>(batch.sets.size());
}

double empirical_error(const BatchOutcome& batch) {
    check(batch);
    std::size_t misses = 0;
    for (std::size_t i = 0; i < batch.sets.size(); ++i)
        if (!batch.sets[i].contains(batch.truths[i])) ++misses;
    return static_cast<double>(misses) / static_cast<double>(batch.sets.size());
}

std::optional<double> effective_one_c(const BatchOutcome& batch) {
    check(batch);
    std::size_t singletons = 0, correct = 0;
    for (std::size_t i = 0; i < batch.sets.size(); ++i) {
        if (batch.sets[i].size() != 1) continue;
        ++singletons;
        if (batch.sets[i].labels[0] == batch.truths[i]) ++correct;
    }
    if (singletons == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(singletons);
}

std::optional<double> pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("pearson_correlation: need two equal-length vectors of size >= 2");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

MetricRecord compute_metrics(const BatchOutcome& batch) {
    MetricRecord rec;
    rec.err = empirical_error(batch);
    rec.one_c = one_c(batch);
    rec.avg_c = avg_c(batch);
    rec.e_one_c = effective_one_c(batch);
    long long singletons = 0;
    for (const auto& s : batch.sets)
        if (s.size() == 1) ++singletons;
    rec.n_singletons = singletons;
    return rec;
}

} // namespace icp
