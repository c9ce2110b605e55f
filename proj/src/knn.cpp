#include <algorithm>
#include <stdexcept>

#include "icp/classifier.hpp"

namespace icp {

namespace {

class KnnClassifier final : public Classifier {
public:
    KnnClassifier(const ClassifierSpec& spec, const DatasetView& train)
        : Classifier(train.n_features(), train.n_classes()), k_(spec.k_neighbors) {
        if (k_ < 1) throw std::invalid_argument("knn: k_neighbors must be >= 1");
        points_.reserve(train.size() * train.n_features());
        labels_.reserve(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            auto row = train.row(i);
            points_.insert(points_.end(), row.begin(), row.end());
            labels_.push_back(train.label(i));
        }
    }

    ProbabilityVector predict_proba(std::span<const double> x) const override {
        check_dims(x);
        const std::size_t n = labels_.size();
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);

        // (squared distance, training position); ties go to the earlier point
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = points_.data() + i * n_features_;
            double d = 0;
            for (std::size_t f = 0; f < n_features_; ++f) {
                double diff = x[f] - p[f];
                d += diff * diff;
            }
            dist[i] = {d, i};
        }
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());

        ProbabilityVector probs(n_classes_, 0.0);
        for (std::size_t i = 0; i < k; ++i) probs[labels_[dist[i].second]] += 1.0;
        for (double& p : probs) p /= static_cast<double>(k);
        return probs;
    }

private:
    int k_;
    std::vector<double> points_;
    std::vector<int> labels_;
};

} // namespace

std::unique_ptr<Classifier> fit_knn(const ClassifierSpec& spec, const DatasetView& train) {
    return std::make_unique<KnnClassifier>(spec, train);
}

} // namespace icp
