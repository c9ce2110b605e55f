#include <algorithm>
#include <numeric>
#include <vector>

#include "icp/classifier.hpp"

namespace icp {

namespace {

// Split quality is compared as the exact rational
//   (S_left * n_right + S_right * n_left) / (n_left * n_right),
// where S = sum of squared class counts; maximizing it minimizes the
// weighted Gini impurity. Exact comparison keeps the (feature, threshold)
// tie-break deterministic.
struct SplitQuality {
    long long num = -1;
    long long den = 1;

    bool better_than(const SplitQuality& o) const {
        return static_cast<__int128>(num) * o.den > static_cast<__int128>(o.num) * den;
    }
};

struct Node {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::vector<double> probs;
};

class DecisionTree final : public Classifier {
public:
    DecisionTree(const ClassifierSpec& spec, const DatasetView& train)
        : Classifier(train.n_features(), train.n_classes()),
          min_split_(effective_min_samples_split(spec, train.size())) {
        rows_.reserve(train.size() * train.n_features());
        labels_.reserve(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            auto row = train.row(i);
            rows_.insert(rows_.end(), row.begin(), row.end());
            labels_.push_back(train.label(i));
        }
        std::vector<std::size_t> all(train.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        build(std::move(all));
    }

    ProbabilityVector predict_proba(std::span<const double> x) const override {
        check_dims(x);
        int n = 0;
        while (nodes_[n].feature >= 0)
            n = x[nodes_[n].feature] <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
        return nodes_[n].probs;
    }

    int min_samples_split() const { return min_split_; }

private:
    double value(std::size_t i, std::size_t f) const { return rows_[i * n_features_ + f]; }

    int build(std::vector<std::size_t> idx) {
        const std::size_t n = idx.size();
        std::vector<long long> counts(n_classes_, 0);
        for (std::size_t i : idx) ++counts[labels_[i]];
        bool pure = *std::max_element(counts.begin(), counts.end()) == static_cast<long long>(n);

        int node_id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();

        int best_feature = -1;
        double best_threshold = 0;
        SplitQuality best;

        if (!pure && n >= static_cast<std::size_t>(min_split_)) {
            std::vector<std::pair<double, int>> col(n);
            for (std::size_t f = 0; f < n_features_; ++f) {
                for (std::size_t i = 0; i < n; ++i) col[i] = {value(idx[i], f), labels_[idx[i]]};
                std::sort(col.begin(), col.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });

                std::vector<long long> left(n_classes_, 0);
                long long s_left = 0;
                long long s_right = 0;
                for (long long c : counts) s_right += c * c;

                for (std::size_t i = 1; i < n; ++i) {
                    int y = col[i - 1].second;
                    s_left += 2 * left[y] + 1;
                    long long r = counts[y] - left[y];
                    s_right += -2 * r + 1;
                    ++left[y];
                    if (col[i].first == col[i - 1].first) continue;

                    long long nl = static_cast<long long>(i);
                    long long nr = static_cast<long long>(n - i);
                    SplitQuality q{s_left * nr + s_right * nl, nl * nr};
                    if (q.better_than(best)) {
                        best = q;
                        best_feature = static_cast<int>(f);
                        best_threshold = (col[i - 1].first + col[i].first) / 2.0;
                    }
                }
            }
        }

        if (best_feature < 0) {
            nodes_[node_id].probs.resize(n_classes_);
            for (int c = 0; c < n_classes_; ++c)
                nodes_[node_id].probs[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (value(i, best_feature) <= best_threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        nodes_[node_id].feature = best_feature;
        nodes_[node_id].threshold = best_threshold;
        // larger child first so pending sibling lists stay O(n) overall
        if (left_idx.size() >= right_idx.size()) {
            int l = build(std::move(left_idx));
            int r = build(std::move(right_idx));
            nodes_[node_id].left = l;
            nodes_[node_id].right = r;
        } else {
            int r = build(std::move(right_idx));
            int l = build(std::move(left_idx));
            nodes_[node_id].left = l;
            nodes_[node_id].right = r;
        }
        return node_id;
    }

    int min_split_;
    std::vector<double> rows_;
    std::vector<int> labels_;
    std::vector<Node> nodes_;
};

} // namespace

std::unique_ptr<Classifier> fit_dtree(const ClassifierSpec& spec, const DatasetView& train) {
    return std::make_unique<DecisionTree>(spec, train);
}

} // namespace icp
