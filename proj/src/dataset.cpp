#include "icp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "icp/rng.hpp"

namespace icp {

Dataset::Dataset(std::vector<double> features, std::size_t n_features,
                 std::vector<int> labels, std::vector<std::string> class_names)
    : features_(std::move(features)),
      n_features_(n_features),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
    if (n_features_ == 0) throw std::invalid_argument("dataset: n_features must be positive");
    if (features_.size() != labels_.size() * n_features_)
        throw std::invalid_argument("dataset: feature matrix is not rectangular");
    if (class_names_.size() < 2) throw std::invalid_argument("dataset: fewer than 2 classes");
    int n_classes = static_cast<int>(class_names_.size());
    for (int y : labels_)
        if (y < 0 || y >= n_classes) throw std::invalid_argument("dataset: label index out of range");
}

std::vector<std::size_t> FoldSplit::train_idx() const {
    std::vector<std::size_t> merged;
    merged.reserve(proper_train_idx.size() + calibration_idx.size());
    std::merge(proper_train_idx.begin(), proper_train_idx.end(),
               calibration_idx.begin(), calibration_idx.end(), std::back_inserter(merged));
    return merged;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, header row expected");
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    std::size_t label_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) { label_col = i; break; }
    if (label_col == header.size())
        throw std::runtime_error(path + ": label column '" + label_column + "' not found");
    if (header.size() < 2)
        throw std::runtime_error(path + ": no feature columns");

    std::vector<double> features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::map<std::string, int> class_index;
    std::size_t line_no = 1;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": row " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::string cell = trim(cells[c]);
            if (c == label_col) {
                auto [it, inserted] = class_index.try_emplace(cell, static_cast<int>(class_names.size()));
                if (inserted) class_names.push_back(cell);
                labels.push_back(it->second);
            } else {
                double v = 0;
                auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc{} || p != cell.data() + cell.size())
                    throw std::runtime_error(path + ": row " + std::to_string(line_no) +
                                             ", column '" + header[c] + "': not a number: '" + cell + "'");
                features.push_back(v);
            }
        }
    }

    if (labels.empty()) throw std::runtime_error(path + ": empty dataset");
    if (class_names.size() < 2) throw std::runtime_error(path + ": fewer than 2 classes");

    return Dataset(std::move(features), header.size() - 1, std::move(labels), std::move(class_names));
}

Dataset generate_synthetic(double sigma, int n_per_class, std::uint64_t seed) {
    if (sigma <= 0) throw std::invalid_argument("generate_synthetic: sigma must be positive");
    if (n_per_class <= 0) throw std::invalid_argument("generate_synthetic: n_per_class must be positive");

    static constexpr double centers[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

    Rng rng(derive_seed(seed, {0x5EEDu}));
    std::vector<double> features;
    std::vector<int> labels;
    features.reserve(static_cast<std::size_t>(n_per_class) * 8);
    labels.reserve(static_cast<std::size_t>(n_per_class) * 4);
    for (int c = 0; c < 4; ++c) {
        for (int i = 0; i < n_per_class; ++i) {
            features.push_back(centers[c][0] + sigma * rng.normal());
            features.push_back(centers[c][1] + sigma * rng.normal());
            labels.push_back(c);
        }
    }
    return Dataset(std::move(features), 2, std::move(labels), {"0", "1", "2", "3"});
}

namespace {

// Largest-remainder apportionment of `total` slots across class counts, so
// each class gets floor or ceil of its proportional share.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& counts, double fraction,
                                   std::size_t total) {
    std::vector<std::size_t> alloc(counts.size());
    std::vector<std::pair<double, std::size_t>> remainders; // (-rem, class) for stable sort
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        double share = fraction * static_cast<double>(counts[c]);
        alloc[c] = static_cast<std::size_t>(std::floor(share));
        if (alloc[c] > counts[c]) alloc[c] = counts[c];
        assigned += alloc[c];
        remainders.emplace_back(-(share - std::floor(share)), c);
    }
    std::sort(remainders.begin(), remainders.end());
    std::size_t i = 0;
    while (assigned < total && i < remainders.size()) {
        std::size_t c = remainders[i++].second;
        if (alloc[c] < counts[c]) {
            ++alloc[c];
            ++assigned;
        }
    }
    return alloc;
}

} // namespace

std::vector<FoldSplit> make_splits(const Dataset& data, const SplitPlan& plan) {
    if (plan.folds < 2) throw std::invalid_argument("make_splits: folds must be >= 2");
    if (plan.repeats < 1) throw std::invalid_argument("make_splits: repeats must be >= 1");
    if (!(plan.calibration_fraction > 0 && plan.calibration_fraction < 1))
        throw std::invalid_argument("make_splits: calibration_fraction must be in (0,1)");

    const int n_classes = data.n_classes();
    const std::size_t folds = static_cast<std::size_t>(plan.folds);

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < data.n_instances(); ++i)
        by_class[data.label(i)].push_back(i);
    for (int c = 0; c < n_classes; ++c)
        if (by_class[c].size() < folds)
            throw std::invalid_argument("make_splits: class '" + data.class_names()[c] + "' has " +
                                        std::to_string(by_class[c].size()) +
                                        " instances, fewer than folds (" + std::to_string(folds) + ")");

    std::vector<FoldSplit> splits;
    splits.reserve(static_cast<std::size_t>(plan.repeats) * folds);

    for (int r = 0; r < plan.repeats; ++r) {
        // Stratified fold assignment: shuffle each class and deal it out
        // round-robin from a random starting fold.
        Rng fold_rng(derive_seed(plan.seed, {0xF01Du, static_cast<std::uint64_t>(r)}));
        std::vector<int> fold_of(data.n_instances());
        for (int c = 0; c < n_classes; ++c) {
            std::vector<std::size_t> idx = by_class[c];
            fold_rng.shuffle(idx);
            std::size_t start = fold_rng.below(folds);
            for (std::size_t i = 0; i < idx.size(); ++i)
                fold_of[idx[i]] = static_cast<int>((start + i) % folds);
        }

        for (std::size_t f = 0; f < folds; ++f) {
            FoldSplit split;
            split.repeat = r;
            split.fold = static_cast<int>(f);

            std::vector<std::vector<std::size_t>> train_by_class(n_classes);
            for (std::size_t i = 0; i < data.n_instances(); ++i) {
                if (fold_of[i] == static_cast<int>(f))
                    split.test_idx.push_back(i);
                else
                    train_by_class[data.label(i)].push_back(i);
            }

            std::size_t train_total = data.n_instances() - split.test_idx.size();
            std::size_t cal_total = static_cast<std::size_t>(
                std::llround(plan.calibration_fraction * static_cast<double>(train_total)));
            std::vector<std::size_t> counts(n_classes);
            for (int c = 0; c < n_classes; ++c) counts[c] = train_by_class[c].size();
            std::vector<std::size_t> cal_per_class =
                apportion(counts, plan.calibration_fraction, cal_total);

            Rng cal_rng(derive_seed(plan.seed, {0xCA11Bu, static_cast<std::uint64_t>(r), f}));
            for (int c = 0; c < n_classes; ++c) {
                std::vector<std::size_t> idx = train_by_class[c];
                cal_rng.shuffle(idx);
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    if (i < cal_per_class[c])
                        split.calibration_idx.push_back(idx[i]);
                    else
                        split.proper_train_idx.push_back(idx[i]);
                }
            }
            std::sort(split.calibration_idx.begin(), split.calibration_idx.end());
            std::sort(split.proper_train_idx.begin(), split.proper_train_idx.end());
            splits.push_back(std::move(split));
        }
    }
    return splits;
}

void save_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (std::size_t f = 0; f < data.n_features(); ++f) out << "x" << (f + 1) << ",";
    out << "label\n";
    char buf[64];
    for (std::size_t i = 0; i < data.n_instances(); ++i) {
        auto row = data.row(i);
        for (double v : row) {
            auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            (void)ec;
            out.write(buf, p - buf);
            out.put(',');
        }
        out << data.class_names()[data.label(i)] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace icp
