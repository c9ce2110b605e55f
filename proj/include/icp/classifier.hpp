#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "icp/dataset.hpp"

namespace icp {

// Per-class posterior estimates; entries in [0,1], summing to 1.
using ProbabilityVector = std::vector<double>;

bool is_probability_vector(std::span<const double> probs, double tol = 1e-9);

enum class ClassifierKind { knn, gnb, dtree };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::knn;
    int k_neighbors = 5;
    int min_samples_split_floor = 5;
    double min_samples_split_fraction = 0.05;
    double variance_smoothing = 1e-9;

    bool operator==(const ClassifierSpec&) const = default;
};

// A fitted model. Immutable after fit; predict_proba is safe to call from any
// number of threads.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual ProbabilityVector predict_proba(std::span<const double> x) const = 0;

    std::size_t n_features() const { return n_features_; }
    int n_classes() const { return n_classes_; }

protected:
    Classifier(std::size_t n_features, int n_classes)
        : n_features_(n_features), n_classes_(n_classes) {}

    void check_dims(std::span<const double> x) const;

    std::size_t n_features_;
    int n_classes_;
};

std::unique_ptr<Classifier> fit(const ClassifierSpec& spec, const DatasetView& train);

// max(floor, ceil(fraction * n_train)); the tree stops splitting below this.
int effective_min_samples_split(const ClassifierSpec& spec, std::size_t n_train);

// argmax of predict_proba, ties toward the lower class index
int predict_label(const Classifier& model, std::span<const double> x);

// Plain cross-validated 0/1 error: train on the full training portion of each
// fold (no calibration holdout), pool errors over all test instances.
double baseline_error(const ClassifierSpec& spec, const Dataset& data, const SplitPlan& plan);

} // namespace icp
