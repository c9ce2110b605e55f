#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace icp {

// Immutable labeled dataset: a rectangular feature matrix (row major) plus one
// class index per row. Class indices refer into class_names, whose order fixes
// the label encoding.
class Dataset {
public:
    Dataset(std::vector<double> features, std::size_t n_features,
            std::vector<int> labels, std::vector<std::string> class_names);

    std::size_t n_instances() const { return labels_.size(); }
    std::size_t n_features() const { return n_features_; }
    int n_classes() const { return static_cast<int>(class_names_.size()); }

    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * n_features_, n_features_};
    }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& class_names() const { return class_names_; }

private:
    std::vector<double> features_;
    std::size_t n_features_;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
};

// Non-owning row subset of a Dataset. Both the dataset and the index storage
// must outlive the view.
struct DatasetView {
    const Dataset* data;
    std::span<const std::size_t> indices;

    std::size_t size() const { return indices.size(); }
    std::span<const double> row(std::size_t i) const { return data->row(indices[i]); }
    int label(std::size_t i) const { return data->label(indices[i]); }
    std::size_t n_features() const { return data->n_features(); }
    int n_classes() const { return data->n_classes(); }
};

inline DatasetView full_view(const Dataset& data, const std::vector<std::size_t>& all_indices) {
    return DatasetView{&data, all_indices};
}

struct SplitPlan {
    int repeats = 10;
    int folds = 10;
    double calibration_fraction = 0.2;
    std::uint64_t seed = 0;

    bool operator==(const SplitPlan&) const = default;
};

// One cross-validation cell: disjoint index lists that cover the dataset.
struct FoldSplit {
    int repeat = 0;
    int fold = 0;
    std::vector<std::size_t> proper_train_idx;
    std::vector<std::size_t> calibration_idx;
    std::vector<std::size_t> test_idx;

    // proper + calibration, ascending; the training set of the baseline mode
    std::vector<std::size_t> train_idx() const;
};

Dataset load_csv(const std::string& path, const std::string& label_column);

// Four isotropic Gaussian clusters centered at (1,0), (0,1), (-1,0), (0,-1),
// n_per_class points each, generated class by class.
Dataset generate_synthetic(double sigma, int n_per_class, std::uint64_t seed);

// Repeated stratified k-fold splits with a stratified calibration holdout
// inside each training portion. Fold assignment derives its RNG from
// (seed, repeat), the holdout from (seed, repeat, fold), so any subset of
// folds can be recomputed independently.
std::vector<FoldSplit> make_splits(const Dataset& data, const SplitPlan& plan);

// Writes x1,...,xd,label rows parseable by load_csv; feature values keep full
// round-trip precision.
void save_csv(const Dataset& data, const std::string& path);

} // namespace icp
