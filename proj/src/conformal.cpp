#include "icp/conformal.hpp"

#include <algorithm>
#include <stdexcept>

namespace icp {

double score(NonconformityKind ncf, std::span<const double> probs, int label) {
    if (label < 0 || label >= static_cast<int>(probs.size()))
        throw std::out_of_range("score: label " + std::to_string(label) + " out of range");
    if (ncf == NonconformityKind::inverse_probability) return 1.0 - probs[label];
    double best_other = 0.0;
    bool seen = false;
    for (int y = 0; y < static_cast<int>(probs.size()); ++y) {
        if (y == label) continue;
        if (!seen || probs[y] > best_other) best_other = probs[y];
        seen = true;
    }
    return best_other - probs[label];
}

double p_value(const CalibrationTable& table, double test_score) {
    auto it = std::lower_bound(table.scores.begin(), table.scores.end(), test_score);
    std::size_t at_least = static_cast<std::size_t>(table.scores.end() - it);
    return static_cast<double>(at_least + 1) / static_cast<double>(table.size() + 1);
}

bool PredictionSet::contains(int label) const {
    return std::binary_search(labels.begin(), labels.end(), label);
}

PredictionSet set_from_p_values(std::span<const double> label_p_values, double epsilon) {
    PredictionSet set;
    set.epsilon = epsilon;
    for (int y = 0; y < static_cast<int>(label_p_values.size()); ++y)
        if (label_p_values[y] > epsilon) set.labels.push_back(y);
    return set;
}

ConformalPredictor ConformalPredictor::calibrate(const Classifier& model, NonconformityKind ncf,
                                                 const DatasetView& calibration) {
    if (calibration.size() == 0)
        throw std::invalid_argument("calibrate: empty calibration view");
    CalibrationTable table;
    table.scores.reserve(calibration.size());
    for (std::size_t i = 0; i < calibration.size(); ++i) {
        ProbabilityVector probs = model.predict_proba(calibration.row(i));
        table.scores.push_back(score(ncf, probs, calibration.label(i)));
    }
    std::sort(table.scores.begin(), table.scores.end());
    return ConformalPredictor(model, ncf, std::move(table));
}

std::vector<double> ConformalPredictor::label_p_values(std::span<const double> x) const {
    ProbabilityVector probs = model_->predict_proba(x);
    std::vector<double> p(probs.size());
    for (int y = 0; y < static_cast<int>(probs.size()); ++y)
        p[y] = p_value(table_, score(ncf_, probs, y));
    return p;
}

PredictionSet ConformalPredictor::predict_set(std::span<const double> x, double epsilon) const {
    return set_from_p_values(label_p_values(x), epsilon);
}

PredictionSet combine_ip_m(const PredictionSet& ip_set, const PredictionSet& m_set) {
    if (m_set.size() == 1 && ip_set.size() != 1) return m_set;
    return ip_set;
}

PredictionSet predict_ip_m(const Classifier& model, const DatasetView& calibration,
                           std::span<const double> x, double epsilon) {
    ConformalPredictor ip =
        ConformalPredictor::calibrate(model, NonconformityKind::inverse_probability, calibration);
    ConformalPredictor m = ConformalPredictor::calibrate(model, NonconformityKind::margin, calibration);
    return combine_ip_m(ip.predict_set(x, epsilon), m.predict_set(x, epsilon / 2.0));
}

} // namespace icp
