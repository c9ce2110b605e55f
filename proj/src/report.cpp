#include "icp/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace icp {

namespace {

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string cell_text(const MatrixCell& cell) {
    if (cell.sign == 0) return "";
    std::string s = cell.sign > 0 ? "+" : "-";
    if (cell.starred) s += "*";
    return s;
}

} // namespace

void write_validity_csv(const std::string& path, const std::vector<ValidityRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << "dataset,epsilon,IP,IP_M,M\n";
    for (const auto& row : rows) {
        out << row.dataset << ',' << format_double(row.epsilon);
        for (double e : row.err) out << ',' << format_double(e);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_matrices_report(const std::string& path, const std::vector<FoldResult>& results,
                           const std::vector<DatasetInfo>& datasets) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);

    std::vector<std::string> dataset_order;
    std::vector<std::string> classifier_order;
    std::vector<double> eps_order;
    for (const auto& rec : results) {
        if (std::find(dataset_order.begin(), dataset_order.end(), rec.dataset) == dataset_order.end())
            dataset_order.push_back(rec.dataset);
        if (std::find(classifier_order.begin(), classifier_order.end(), rec.classifier) ==
            classifier_order.end())
            classifier_order.push_back(rec.classifier);
        if (std::find(eps_order.begin(), eps_order.end(), rec.epsilon) == eps_order.end())
            eps_order.push_back(rec.epsilon);
    }
    std::sort(eps_order.begin(), eps_order.end());

    auto n_classes_of = [&](const std::string& id) {
        for (const auto& info : datasets)
            if (info.id == id) return info.n_classes;
        throw std::runtime_error("no dataset metadata for '" + id + "'");
    };

    out << "# Conformal efficiency report\n";

    out << "\n## Validity (mean empirical error)\n";
    std::vector<ValidityRow> validity = summarize_validity(results);
    std::string current;
    for (const auto& row : validity) {
        if (row.dataset != current) {
            current = row.dataset;
            out << "\n### " << current << "\n\n";
            out << "| epsilon | IP | IP_M | M |\n|---|---|---|---|\n";
        }
        out << "| " << format_double(row.epsilon);
        for (double e : row.err) out << " | " << two_decimals(e);
        out << " |\n";
    }

    out << "\n## Comparison matrices\n";
    out << "\nA row setup is better (+) or worse (-) than the column setup when the mean\n"
           "difference exceeds 2% of the metric's maximum or the paired t-test is\n"
           "significant at alpha = 0.05; * marks significance. Empty cells: no difference.\n";

    // fold metric vectors keyed by (dataset, classifier, epsilon, ncf)
    std::map<std::tuple<std::string, std::string, double, int>,
             std::array<std::vector<double>, 2>>
        series;
    for (const auto& rec : results) {
        auto& entry = series[{rec.dataset, rec.classifier, rec.epsilon, static_cast<int>(rec.ncf)}];
        entry[0].push_back(rec.metrics.one_c);
        entry[1].push_back(rec.metrics.avg_c);
    }

    static const char* metric_names[2] = {"oneC", "avgC"};
    for (const auto& ds : dataset_order) {
        int n_classes = n_classes_of(ds);
        for (const auto& cl : classifier_order) {
            bool headed = false;
            for (int mi = 0; mi < 2; ++mi) {
                MetricKind metric = mi == 0 ? MetricKind::one_c : MetricKind::avg_c;
                // one table per metric: rows ncf, column groups per epsilon
                std::vector<ComparisonMatrix> per_eps;
                for (double eps : eps_order) {
                    std::array<std::vector<double>, 3> per_ncf;
                    bool complete = true;
                    for (int n = 0; n < 3; ++n) {
                        auto it = series.find({ds, cl, eps, n});
                        if (it == series.end()) {
                            complete = false;
                            break;
                        }
                        per_ncf[n] = it->second[mi];
                    }
                    if (!complete) continue;
                    per_eps.push_back(build_matrix(per_ncf, metric, n_classes));
                }
                if (per_eps.empty()) continue;
                if (!headed) {
                    out << "\n### " << ds << " / " << cl << "\n";
                    headed = true;
                }
                out << "\n#### " << metric_names[mi] << "\n\n";
                out << "| |";
                for (double eps : eps_order)
                    out << " eps=" << format_double(eps) << ": IP | IP_M | M |";
                out << "\n|---|";
                for (std::size_t i = 0; i < eps_order.size() * 3; ++i) out << "---|";
                out << "\n";
                static const char* row_names[3] = {"IP", "IP_M", "M"};
                for (int r = 0; r < 3; ++r) {
                    out << "| " << row_names[r] << " |";
                    for (const auto& matrix : per_eps)
                        for (int c = 0; c < 3; ++c) out << " " << cell_text(matrix.cells[r][c]) << " |";
                    out << "\n";
                }
            }
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace icp
