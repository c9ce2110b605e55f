#include <cmath>
#include <limits>
#include <vector>

#include "icp/classifier.hpp"

namespace icp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

class GaussianNaiveBayes final : public Classifier {
public:
    GaussianNaiveBayes(const ClassifierSpec& spec, const DatasetView& train)
        : Classifier(train.n_features(), train.n_classes()) {
        const std::size_t d = n_features_;
        const int nc = n_classes_;
        counts_.assign(nc, 0);
        mean_.assign(static_cast<std::size_t>(nc) * d, 0.0);
        var_.assign(static_cast<std::size_t>(nc) * d, 0.0);

        for (std::size_t i = 0; i < train.size(); ++i) {
            int y = train.label(i);
            ++counts_[y];
            auto row = train.row(i);
            for (std::size_t f = 0; f < d; ++f) mean_[y * d + f] += row[f];
        }
        for (int c = 0; c < nc; ++c)
            if (counts_[c] > 0)
                for (std::size_t f = 0; f < d; ++f) mean_[c * d + f] /= counts_[c];
        for (std::size_t i = 0; i < train.size(); ++i) {
            int y = train.label(i);
            auto row = train.row(i);
            for (std::size_t f = 0; f < d; ++f) {
                double diff = row[f] - mean_[y * d + f];
                var_[y * d + f] += diff * diff;
            }
        }
        for (int c = 0; c < nc; ++c)
            if (counts_[c] > 0)
                for (std::size_t f = 0; f < d; ++f) var_[c * d + f] /= counts_[c];

        // Smoothing keyed to the largest overall feature variance keeps the
        // likelihood finite when a class sees a constant feature.
        double max_var = 0;
        for (std::size_t f = 0; f < d; ++f) {
            double m = 0, s = 0;
            for (std::size_t i = 0; i < train.size(); ++i) m += train.row(i)[f];
            m /= static_cast<double>(train.size());
            for (std::size_t i = 0; i < train.size(); ++i) {
                double diff = train.row(i)[f] - m;
                s += diff * diff;
            }
            max_var = std::max(max_var, s / static_cast<double>(train.size()));
        }
        double eps = spec.variance_smoothing * max_var;
        if (eps <= 0) eps = spec.variance_smoothing;
        for (double& v : var_) v += eps;

        log_prior_.assign(nc, -std::numeric_limits<double>::infinity());
        for (int c = 0; c < nc; ++c)
            if (counts_[c] > 0)
                log_prior_[c] = std::log(static_cast<double>(counts_[c]) /
                                         static_cast<double>(train.size()));
    }

    ProbabilityVector predict_proba(std::span<const double> x) const override {
        check_dims(x);
        const std::size_t d = n_features_;
        std::vector<double> ll(n_classes_, -std::numeric_limits<double>::infinity());
        double max_ll = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_classes_; ++c) {
            if (counts_[c] == 0) continue;
            double v = log_prior_[c];
            for (std::size_t f = 0; f < d; ++f) {
                double var = var_[c * d + f];
                double diff = x[f] - mean_[c * d + f];
                v += -0.5 * (kLog2Pi + std::log(var)) - diff * diff / (2.0 * var);
            }
            ll[c] = v;
            max_ll = std::max(max_ll, v);
        }
        ProbabilityVector probs(n_classes_, 0.0);
        double sum = 0;
        for (int c = 0; c < n_classes_; ++c) {
            if (counts_[c] == 0) continue;
            probs[c] = std::exp(ll[c] - max_ll);
            sum += probs[c];
        }
        for (double& p : probs) p /= sum;
        return probs;
    }

private:
    std::vector<std::size_t> counts_;
    std::vector<double> mean_;
    std::vector<double> var_; // ML variance + smoothing epsilon
    std::vector<double> log_prior_;
};

} // namespace

std::unique_ptr<Classifier> fit_gnb(const ClassifierSpec& spec, const DatasetView& train) {
    return std::make_unique<GaussianNaiveBayes>(spec, train);
}

} // namespace icp
