#pragma once

#include <optional>
#include <span>
#include <vector>

#include "icp/conformal.hpp"

namespace icp {

// Prediction sets for one test batch together with the true labels.
struct BatchOutcome {
    std::vector<PredictionSet> sets;
    std::vector<int> truths;
    int n_classes = 0;
};

// fraction of singleton sets
double one_c(const BatchOutcome& batch);

// mean set size; empty sets contribute 0
double avg_c(const BatchOutcome& batch);

// fraction of instances whose true label is missing from the set
double empirical_error(const BatchOutcome& batch);

// among singletons, the fraction that contain the truth; nullopt when the
// batch has no singletons
std::optional<double> effective_one_c(const BatchOutcome& batch);

std::optional<double> pearson_correlation(std::span<const double> xs, std::span<const double> ys);

struct MetricRecord {
    double err = 0;
    double one_c = 0;
    double avg_c = 0;
    std::optional<double> e_one_c;
    long long n_singletons = 0;

    bool operator==(const MetricRecord&) const = default;
};

MetricRecord compute_metrics(const BatchOutcome& batch);

} // namespace icp
