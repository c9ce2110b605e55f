#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "icp/classifier.hpp"
#include "icp/dataset.hpp"
#include "icp/metrics.hpp"

namespace icp {

// The three conformal setups compared throughout: inverse probability at
// epsilon, the IP/M combination, and margin at epsilon.
enum class NcfId { ip = 0, ip_m = 1, m = 2 };
inline constexpr std::array<NcfId, 3> kAllNcfs = {NcfId::ip, NcfId::ip_m, NcfId::m};

std::string to_string(NcfId ncf);
NcfId ncf_from_string(const std::string& s);

enum class MetricKind { one_c, avg_c };

struct SyntheticSpec {
    double sigma = 0.6;
    int n_per_class = 2000;
    std::optional<std::uint64_t> seed; // defaults to a value derived from the plan seed

    bool operator==(const SyntheticSpec&) const = default;
};

struct CsvSpec {
    std::string path;
    std::string label_column = "label";

    bool operator==(const CsvSpec&) const = default;
};

struct DatasetSource {
    std::string id;
    std::variant<CsvSpec, SyntheticSpec> source;

    bool operator==(const DatasetSource&) const = default;
};

struct ClassifierEntry {
    std::string id;
    ClassifierSpec spec;

    bool operator==(const ClassifierEntry&) const = default;
};

struct ExperimentGrid {
    std::vector<DatasetSource> datasets;
    std::vector<ClassifierEntry> classifiers;
    std::vector<double> epsilons = {0.01, 0.05, 0.1, 0.15, 0.2};
    SplitPlan plan;

    bool operator==(const ExperimentGrid&) const = default;
};

// throws std::invalid_argument naming the offending field
void validate_grid(const ExperimentGrid& grid);

struct FoldResult {
    std::string dataset;
    std::string classifier;
    NcfId ncf = NcfId::ip;
    double epsilon = 0;
    int repeat = 0;
    int fold = 0;
    int n_test = 0;
    MetricRecord metrics;

    bool operator==(const FoldResult&) const = default;
};

struct DatasetInfo {
    std::string id;
    int n_classes = 0;
    std::size_t n_instances = 0;
    std::size_t n_features = 0;
};

struct RunOutput {
    std::vector<FoldResult> results;
    std::vector<DatasetInfo> datasets;
    std::vector<std::string> warnings; // skipped datasets/classifiers
};

// Resolve a dataset source (CSV load or synthetic generation). plan_seed
// feeds the default synthetic seed.
Dataset resolve_dataset(const DatasetSource& source, std::uint64_t plan_seed);

// Runs the whole (dataset x classifier x fold) grid; one model fit per fold
// is shared by every nonconformity setup and significance level. Results are
// deterministic for a given plan seed regardless of the worker count.
RunOutput run_grid(const ExperimentGrid& grid, unsigned workers = 0);

enum class Comparison { better, worse, neither };

// 2% rule: for one_c the raw difference, for avg_c scaled by the class count
// (the metric's maximum). `a` is better when it has higher one_c / lower avg_c.
Comparison threshold_compare(double mean_a, double mean_b, MetricKind metric, int n_classes);

struct MatrixCell {
    int sign = 0; // -1, 0, +1
    bool starred = false;

    bool operator==(const MatrixCell&) const = default;
};

// 3x3 over {IP, IP_M, M}; antisymmetric, empty diagonal.
struct ComparisonMatrix {
    MetricKind metric = MetricKind::one_c;
    std::array<std::array<MatrixCell, 3>, 3> cells{};
};

// per_ncf[i] holds the per-fold metric values of kAllNcfs[i], fold order
// matching across the three
ComparisonMatrix build_matrix(const std::array<std::vector<double>, 3>& per_ncf,
                              MetricKind metric, int n_classes, double alpha = 0.05);

struct ValidityRow {
    std::string dataset; // "MEAN" for the grand average
    double epsilon = 0;
    std::array<double, 3> err{}; // indexed by NcfId order
};

// Mean empirical error per (dataset, ncf, epsilon), plus a MEAN block
// averaged over datasets.
std::vector<ValidityRow> summarize_validity(const std::vector<FoldResult>& results);

// results.csv (see README for the schema); values keep full precision and
// parse back bit for bit
void write_results_csv(const std::string& path, const std::vector<FoldResult>& results);
std::vector<FoldResult> read_results_csv(const std::string& path);

void write_dataset_meta_csv(const std::string& path, const std::vector<DatasetInfo>& infos);
std::vector<DatasetInfo> read_dataset_meta_csv(const std::string& path);

std::string format_double(double v);

} // namespace icp
