#include "icp/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "icp/conformal.hpp"
#include "icp/rng.hpp"
#include "icp/stats.hpp"

namespace icp {

std::string to_string(NcfId ncf) {
    switch (ncf) {
        case NcfId::ip: return "IP";
        case NcfId::ip_m: return "IP_M";
        case NcfId::m: return "M";
    }
    return "?";
}

NcfId ncf_from_string(const std::string& s) {
    if (s == "IP") return NcfId::ip;
    if (s == "IP_M") return NcfId::ip_m;
    if (s == "M") return NcfId::m;
    throw std::invalid_argument("unknown nonconformity id: '" + s + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void validate_grid(const ExperimentGrid& grid) {
    if (grid.datasets.empty()) throw std::invalid_argument("datasets: at least one required");
    if (grid.classifiers.empty()) throw std::invalid_argument("classifiers: at least one required");
    if (grid.epsilons.empty()) throw std::invalid_argument("epsilons: at least one required");
    for (std::size_t i = 0; i < grid.epsilons.size(); ++i) {
        double e = grid.epsilons[i];
        if (!(e > 0 && e < 1))
            throw std::invalid_argument("epsilons: value " + format_double(e) + " outside (0,1)");
        if (i > 0 && !(e > grid.epsilons[i - 1]))
            throw std::invalid_argument("epsilons: must be strictly increasing");
    }
    if (grid.plan.folds < 2) throw std::invalid_argument("folds: must be >= 2");
    if (grid.plan.repeats < 1) throw std::invalid_argument("repeats: must be >= 1");
    if (!(grid.plan.calibration_fraction > 0 && grid.plan.calibration_fraction < 1))
        throw std::invalid_argument("calibration_fraction: must be in (0,1)");
    std::vector<std::string> ids;
    for (const auto& d : grid.datasets) {
        if (d.id.empty()) throw std::invalid_argument("datasets: empty id");
        if (std::find(ids.begin(), ids.end(), d.id) != ids.end())
            throw std::invalid_argument("datasets: duplicate id '" + d.id + "'");
        ids.push_back(d.id);
        if (const auto* syn = std::get_if<SyntheticSpec>(&d.source)) {
            if (!(syn->sigma > 0)) throw std::invalid_argument("datasets: sigma must be positive");
            if (syn->n_per_class < 1)
                throw std::invalid_argument("datasets: n_per_class must be positive");
        }
    }
    ids.clear();
    for (const auto& c : grid.classifiers) {
        if (c.id.empty()) throw std::invalid_argument("classifiers: empty id");
        if (std::find(ids.begin(), ids.end(), c.id) != ids.end())
            throw std::invalid_argument("classifiers: duplicate id '" + c.id + "'");
        ids.push_back(c.id);
        if (c.spec.k_neighbors < 1) throw std::invalid_argument("classifiers: k_neighbors must be >= 1");
        if (!(c.spec.min_samples_split_fraction >= 0 && c.spec.min_samples_split_fraction < 1))
            throw std::invalid_argument("classifiers: min_samples_split_fraction must be in [0,1)");
        if (c.spec.min_samples_split_floor < 1)
            throw std::invalid_argument("classifiers: min_samples_split_floor must be >= 1");
        if (!(c.spec.variance_smoothing > 0))
            throw std::invalid_argument("classifiers: variance_smoothing must be positive");
    }
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

Dataset resolve_dataset(const DatasetSource& source, std::uint64_t plan_seed) {
    if (const auto* csv = std::get_if<CsvSpec>(&source.source))
        return load_csv(csv->path, csv->label_column);
    const auto& syn = std::get<SyntheticSpec>(source.source);
    std::uint64_t seed = syn.seed ? *syn.seed : derive_seed(plan_seed, {0xDA7Au, fnv1a(source.id)});
    return generate_synthetic(syn.sigma, syn.n_per_class, seed);
}

namespace {

// All fold results of one (dataset, classifier, fold) cell; a single model
// fit feeds every nonconformity setup and epsilon.
std::vector<FoldResult> evaluate_fold(const Dataset& data, const std::string& dataset_id,
                                      const ClassifierEntry& classifier, const FoldSplit& split,
                                      const std::vector<double>& epsilons) {
    std::unique_ptr<Classifier> model =
        fit(classifier.spec, DatasetView{&data, split.proper_train_idx});
    DatasetView cal_view{&data, split.calibration_idx};
    ConformalPredictor ip =
        ConformalPredictor::calibrate(*model, NonconformityKind::inverse_probability, cal_view);
    ConformalPredictor m = ConformalPredictor::calibrate(*model, NonconformityKind::margin, cal_view);

    const int n_classes = data.n_classes();
    const std::size_t n_eps = epsilons.size();
    std::array<std::vector<BatchOutcome>, 3> outcomes;
    for (auto& per_eps : outcomes) {
        per_eps.resize(n_eps);
        for (auto& batch : per_eps) batch.n_classes = n_classes;
    }

    std::vector<double> p_ip(n_classes), p_m(n_classes);
    for (std::size_t t : split.test_idx) {
        ProbabilityVector probs = model->predict_proba(data.row(t));
        for (int y = 0; y < n_classes; ++y) {
            p_ip[y] = p_value(ip.table(), score(NonconformityKind::inverse_probability, probs, y));
            p_m[y] = p_value(m.table(), score(NonconformityKind::margin, probs, y));
        }
        int truth = data.label(t);
        for (std::size_t e = 0; e < n_eps; ++e) {
            double eps = epsilons[e];
            PredictionSet ip_set = set_from_p_values(p_ip, eps);
            PredictionSet m_set = set_from_p_values(p_m, eps);
            PredictionSet m_half = set_from_p_values(p_m, eps / 2.0);
            PredictionSet ipm_set = combine_ip_m(ip_set, m_half);

            auto push = [&](NcfId ncf, PredictionSet set) {
                auto& batch = outcomes[static_cast<int>(ncf)][e];
                batch.sets.push_back(std::move(set));
                batch.truths.push_back(truth);
            };
            push(NcfId::ip, std::move(ip_set));
            push(NcfId::ip_m, std::move(ipm_set));
            push(NcfId::m, std::move(m_set));
        }
    }

    std::vector<FoldResult> records;
    records.reserve(3 * n_eps);
    for (NcfId ncf : kAllNcfs) {
        for (std::size_t e = 0; e < n_eps; ++e) {
            FoldResult rec;
            rec.dataset = dataset_id;
            rec.classifier = classifier.id;
            rec.ncf = ncf;
            rec.epsilon = epsilons[e];
            rec.repeat = split.repeat;
            rec.fold = split.fold;
            rec.n_test = static_cast<int>(split.test_idx.size());
            rec.metrics = compute_metrics(outcomes[static_cast<int>(ncf)][e]);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

} // namespace

RunOutput run_grid(const ExperimentGrid& grid, unsigned workers) {
    validate_grid(grid);
    RunOutput out;

    struct LoadedDataset {
        Dataset data;
        std::vector<FoldSplit> splits;
    };
    std::vector<std::optional<LoadedDataset>> loaded(grid.datasets.size());
    for (std::size_t d = 0; d < grid.datasets.size(); ++d) {
        try {
            Dataset data = resolve_dataset(grid.datasets[d], grid.plan.seed);
            std::vector<FoldSplit> splits = make_splits(data, grid.plan);
            out.datasets.push_back(DatasetInfo{grid.datasets[d].id, data.n_classes(),
                                               data.n_instances(), data.n_features()});
            loaded[d] = LoadedDataset{std::move(data), std::move(splits)};
        } catch (const std::exception& e) {
            out.warnings.push_back("dataset '" + grid.datasets[d].id + "' skipped: " + e.what());
        }
    }

    struct Task {
        std::size_t dataset;
        std::size_t classifier;
        std::size_t split;
    };
    std::vector<Task> tasks;
    for (std::size_t d = 0; d < grid.datasets.size(); ++d) {
        if (!loaded[d]) continue;
        for (std::size_t c = 0; c < grid.classifiers.size(); ++c)
            for (std::size_t s = 0; s < loaded[d]->splits.size(); ++s) tasks.push_back({d, c, s});
    }

    std::vector<std::vector<FoldResult>> slots(tasks.size());
    std::vector<std::string> task_warnings(tasks.size());

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, std::max<std::size_t>(tasks.size(), 1));

    std::atomic<std::size_t> next{0};
    auto worker_fn = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            const LoadedDataset& ld = *loaded[task.dataset];
            const FoldSplit& split = ld.splits[task.split];
            try {
                slots[i] = evaluate_fold(ld.data, grid.datasets[task.dataset].id,
                                         grid.classifiers[task.classifier], split, grid.epsilons);
            } catch (const std::exception& e) {
                task_warnings[i] = "dataset '" + grid.datasets[task.dataset].id + "', classifier '" +
                                   grid.classifiers[task.classifier].id + "', repeat " +
                                   std::to_string(split.repeat) + ", fold " +
                                   std::to_string(split.fold) + " skipped: " + e.what();
            }
        }
    };

    if (workers <= 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!task_warnings[i].empty()) out.warnings.push_back(task_warnings[i]);
        for (auto& rec : slots[i]) out.results.push_back(std::move(rec));
    }
    return out;
}

Comparison threshold_compare(double mean_a, double mean_b, MetricKind metric, int n_classes) {
    double threshold = metric == MetricKind::one_c ? 0.02 : 0.02 * n_classes;
    double advantage = metric == MetricKind::one_c ? mean_a - mean_b : mean_b - mean_a;
    if (advantage > threshold) return Comparison::better;
    if (-advantage > threshold) return Comparison::worse;
    return Comparison::neither;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

ComparisonMatrix build_matrix(const std::array<std::vector<double>, 3>& per_ncf,
                              MetricKind metric, int n_classes, double alpha) {
    const std::size_t n = per_ncf[0].size();
    if (per_ncf[1].size() != n || per_ncf[2].size() != n)
        throw std::invalid_argument("build_matrix: fold counts differ across setups");
    if (n < 2) throw std::invalid_argument("build_matrix: need at least 2 folds");

    ComparisonMatrix matrix;
    matrix.metric = metric;
    for (int r = 0; r < 3; ++r) {
        for (int c = r + 1; c < 3; ++c) {
            double mr = mean_of(per_ncf[r]);
            double mc = mean_of(per_ncf[c]);
            Comparison cmp = threshold_compare(mr, mc, metric, n_classes);
            TTestResult tt = paired_t_test(per_ncf[r], per_ncf[c], alpha);
            if (cmp == Comparison::neither && !tt.significant) continue;

            int advantage_sign;
            if (metric == MetricKind::one_c)
                advantage_sign = mr > mc ? 1 : (mr < mc ? -1 : 0);
            else
                advantage_sign = mr < mc ? 1 : (mr > mc ? -1 : 0);
            if (advantage_sign == 0) continue;

            matrix.cells[r][c] = MatrixCell{advantage_sign, tt.significant};
            matrix.cells[c][r] = MatrixCell{-advantage_sign, tt.significant};
        }
    }
    return matrix;
}

std::vector<ValidityRow> summarize_validity(const std::vector<FoldResult>& results) {
    std::vector<std::string> dataset_order;
    std::vector<double> eps_order;
    for (const auto& rec : results) {
        if (std::find(dataset_order.begin(), dataset_order.end(), rec.dataset) == dataset_order.end())
            dataset_order.push_back(rec.dataset);
        if (std::find(eps_order.begin(), eps_order.end(), rec.epsilon) == eps_order.end())
            eps_order.push_back(rec.epsilon);
    }
    std::sort(eps_order.begin(), eps_order.end());

    // (dataset, epsilon, ncf) -> (sum, count)
    std::map<std::tuple<std::string, double, int>, std::pair<double, std::size_t>> acc;
    for (const auto& rec : results) {
        auto& cell = acc[{rec.dataset, rec.epsilon, static_cast<int>(rec.ncf)}];
        cell.first += rec.metrics.err;
        cell.second += 1;
    }

    std::vector<ValidityRow> rows;
    for (double eps : eps_order) {
        ValidityRow mean_row;
        mean_row.dataset = "MEAN";
        mean_row.epsilon = eps;
        std::array<std::size_t, 3> mean_counts{};
        for (const auto& ds : dataset_order) {
            ValidityRow row;
            row.dataset = ds;
            row.epsilon = eps;
            bool any = false;
            for (int n = 0; n < 3; ++n) {
                auto it = acc.find({ds, eps, n});
                if (it == acc.end()) continue;
                row.err[n] = it->second.first / static_cast<double>(it->second.second);
                mean_row.err[n] += row.err[n];
                ++mean_counts[n];
                any = true;
            }
            if (any) rows.push_back(std::move(row));
        }
        for (int n = 0; n < 3; ++n)
            if (mean_counts[n] > 0) mean_row.err[n] /= static_cast<double>(mean_counts[n]);
        rows.push_back(std::move(mean_row));
    }

    // group rows per dataset (all epsilons together), MEAN block last
    std::vector<ValidityRow> grouped;
    dataset_order.push_back("MEAN");
    for (const auto& ds : dataset_order)
        for (const auto& row : rows)
            if (row.dataset == ds) grouped.push_back(row);
    return grouped;
}

namespace {

constexpr const char* kResultsHeader =
    "dataset,classifier,ncf,epsilon,repeat,fold,n_test,err,oneC,avgC,e_oneC,n_singletons";

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_double(const std::string& s, const std::string& what, std::size_t line_no) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("results csv line " + std::to_string(line_no) + ": bad " + what +
                                 " '" + s + "'");
    return v;
}

long long parse_int(const std::string& s, const std::string& what, std::size_t line_no) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("results csv line " + std::to_string(line_no) + ": bad " + what +
                                 " '" + s + "'");
    return v;
}

} // namespace

void write_results_csv(const std::string& path, const std::vector<FoldResult>& results) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << kResultsHeader << "\n";
    for (const auto& rec : results) {
        out << rec.dataset << ',' << rec.classifier << ',' << to_string(rec.ncf) << ','
            << format_double(rec.epsilon) << ',' << rec.repeat << ',' << rec.fold << ','
            << rec.n_test << ',' << format_double(rec.metrics.err) << ','
            << format_double(rec.metrics.one_c) << ',' << format_double(rec.metrics.avg_c) << ',';
        if (rec.metrics.e_one_c) out << format_double(*rec.metrics.e_one_c);
        out << ',' << rec.metrics.n_singletons << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<FoldResult> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || split_cells(line) != split_cells(kResultsHeader))
        throw std::runtime_error(path + ": missing or unexpected results header");

    std::vector<FoldResult> results;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_cells(line);
        if (cells.size() != 12)
            throw std::runtime_error("results csv line " + std::to_string(line_no) + ": expected 12 cells, got " +
                                     std::to_string(cells.size()));
        FoldResult rec;
        rec.dataset = cells[0];
        rec.classifier = cells[1];
        rec.ncf = ncf_from_string(cells[2]);
        rec.epsilon = parse_double(cells[3], "epsilon", line_no);
        rec.repeat = static_cast<int>(parse_int(cells[4], "repeat", line_no));
        rec.fold = static_cast<int>(parse_int(cells[5], "fold", line_no));
        rec.n_test = static_cast<int>(parse_int(cells[6], "n_test", line_no));
        rec.metrics.err = parse_double(cells[7], "err", line_no);
        rec.metrics.one_c = parse_double(cells[8], "oneC", line_no);
        rec.metrics.avg_c = parse_double(cells[9], "avgC", line_no);
        if (!cells[10].empty()) rec.metrics.e_one_c = parse_double(cells[10], "e_oneC", line_no);
        rec.metrics.n_singletons = parse_int(cells[11], "n_singletons", line_no);
        results.push_back(std::move(rec));
    }
    return results;
}

void write_dataset_meta_csv(const std::string& path, const std::vector<DatasetInfo>& infos) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << "dataset,n_classes,n_instances,n_features\n";
    for (const auto& info : infos)
        out << info.id << ',' << info.n_classes << ',' << info.n_instances << ','
            << info.n_features << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<DatasetInfo> read_dataset_meta_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty dataset meta file");
    std::vector<DatasetInfo> infos;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_cells(line);
        if (cells.size() != 4)
            throw std::runtime_error(path + " line " + std::to_string(line_no) + ": expected 4 cells");
        DatasetInfo info;
        info.id = cells[0];
        info.n_classes = static_cast<int>(parse_int(cells[1], "n_classes", line_no));
        info.n_instances = static_cast<std::size_t>(parse_int(cells[2], "n_instances", line_no));
        info.n_features = static_cast<std::size_t>(parse_int(cells[3], "n_features", line_no));
        infos.push_back(std::move(info));
    }
    return infos;
}

} // namespace icp
