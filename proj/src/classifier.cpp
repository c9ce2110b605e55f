#include "icp/classifier.hpp"

#include <cmath>
#include <stdexcept>

namespace icp {

bool is_probability_vector(std::span<const double> probs, double tol) {
    double sum = 0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::gnb: return "gnb";
        case ClassifierKind::dtree: return "dtree";
    }
    return "?";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
    if (s == "knn") return ClassifierKind::knn;
    if (s == "gnb") return ClassifierKind::gnb;
    if (s == "dtree") return ClassifierKind::dtree;
    throw std::invalid_argument("unknown classifier kind: '" + s + "'");
}

void Classifier::check_dims(std::span<const double> x) const {
    if (x.size() != n_features_)
        throw std::invalid_argument("predict_proba: expected " + std::to_string(n_features_) +
                                    " features, got " + std::to_string(x.size()));
}

int effective_min_samples_split(const ClassifierSpec& spec, std::size_t n_train) {
    int from_fraction = static_cast<int>(
        std::ceil(spec.min_samples_split_fraction * static_cast<double>(n_train)));
    return std::max(spec.min_samples_split_floor, from_fraction);
}

std::unique_ptr<Classifier> fit_knn(const ClassifierSpec& spec, const DatasetView& train);
std::unique_ptr<Classifier> fit_gnb(const ClassifierSpec& spec, const DatasetView& train);
std::unique_ptr<Classifier> fit_dtree(const ClassifierSpec& spec, const DatasetView& train);

std::unique_ptr<Classifier> fit(const ClassifierSpec& spec, const DatasetView& train) {
    if (train.size() == 0) throw std::invalid_argument("fit: empty training view");
    switch (spec.kind) {
        case ClassifierKind::knn: return fit_knn(spec, train);
        case ClassifierKind::gnb: return fit_gnb(spec, train);
        case ClassifierKind::dtree: return fit_dtree(spec, train);
    }
    throw std::invalid_argument("fit: unknown classifier kind");
}

int predict_label(const Classifier& model, std::span<const double> x) {
    ProbabilityVector probs = model.predict_proba(x);
    int best = 0;
    for (int c = 1; c < static_cast<int>(probs.size()); ++c)
        if (probs[c] > probs[best]) best = c;
    return best;
}

double baseline_error(const ClassifierSpec& spec, const Dataset& data, const SplitPlan& plan) {
    std::vector<FoldSplit> splits = make_splits(data, plan);
    std::size_t errors = 0, total = 0;
    for (const FoldSplit& split : splits) {
        std::vector<std::size_t> train_idx = split.train_idx();
        std::unique_ptr<Classifier> model = fit(spec, DatasetView{&data, train_idx});
        for (std::size_t i : split.test_idx) {
            if (predict_label(*model, data.row(i)) != data.label(i)) ++errors;
            ++total;
        }
    }
    return static_cast<double>(errors) / static_cast<double>(total);
}

} // namespace icp
