#pragma once

#include <span>
#include <vector>

#include "icp/classifier.hpp"
#include "icp/dataset.hpp"

namespace icp {

enum class NonconformityKind {
    inverse_probability, // 1 - P(label | x), a.k.a. hinge
    margin,              // max over other labels of P(y | x) minus P(label | x)
};

// Nonconformity of assigning `label` to an instance with posterior `probs`.
// inverse_probability lands in [0,1], margin in [-1,1].
double score(NonconformityKind ncf, std::span<const double> probs, int label);

// Sorted nonconformity scores of a calibration split.
struct CalibrationTable {
    std::vector<double> scores; // ascending

    std::size_t size() const { return scores.size(); }
};

// p = (#{calibration scores >= test_score} + 1) / (q + 1), ties counted.
double p_value(const CalibrationTable& table, double test_score);

struct PredictionSet {
    std::vector<int> labels; // ascending class indices
    double epsilon = 0;

    std::size_t size() const { return labels.size(); }
    bool contains(int label) const;
};

// keep label y iff its p-value exceeds epsilon (strict)
PredictionSet set_from_p_values(std::span<const double> label_p_values, double epsilon);

class ConformalPredictor {
public:
    // Scores every calibration pair with the fitted model; the calibration
    // instances must be disjoint from the model's training instances.
    static ConformalPredictor calibrate(const Classifier& model, NonconformityKind ncf,
                                        const DatasetView& calibration);

    // one p-value per class label
    std::vector<double> label_p_values(std::span<const double> x) const;

    PredictionSet predict_set(std::span<const double> x, double epsilon) const;

    const CalibrationTable& table() const { return table_; }
    NonconformityKind ncf() const { return ncf_; }
    const Classifier& model() const { return *model_; }

private:
    ConformalPredictor(const Classifier& model, NonconformityKind ncf, CalibrationTable table)
        : model_(&model), ncf_(ncf), table_(std::move(table)) {}

    const Classifier* model_;
    NonconformityKind ncf_;
    CalibrationTable table_;
};

// Combination rule: the margin set (computed at epsilon/2 by the caller)
// replaces the inverse-probability set only when it is a singleton and the
// inverse-probability set is not.
PredictionSet combine_ip_m(const PredictionSet& ip_set, const PredictionSet& m_set);

// Full combined prediction for one instance: inverse probability at epsilon,
// margin at epsilon/2, both calibrated on the same instances.
PredictionSet predict_ip_m(const Classifier& model, const DatasetView& calibration,
                           std::span<const double> x, double epsilon);

} // namespace icp
