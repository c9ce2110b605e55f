// icpbench: generate datasets, run the conformal benchmark grid, and render
// reports/plots. Exit codes: 0 success, 1 usage or validation error,
// 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "icp/config.hpp"
#include "icp/dataset.hpp"
#include "icp/evaluation.hpp"
#include "icp/report.hpp"
#include "icp/svg.hpp"

namespace fs = std::filesystem;

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_');
    return out;
}

// mean metric per (ncf, epsilon) for one (dataset, classifier) group
struct CurveSet {
    std::vector<double> epsilons;
    std::array<std::vector<double>, 3> one_c;
    std::array<std::vector<double>, 3> avg_c;
};

std::map<std::pair<std::string, std::string>, CurveSet> collect_curves(
    const std::vector<icp::FoldResult>& results) {
    std::set<double> eps_set;
    for (const auto& rec : results) eps_set.insert(rec.epsilon);
    std::vector<double> epsilons(eps_set.begin(), eps_set.end());

    std::map<std::tuple<std::string, std::string, int, double>, std::pair<double, std::size_t>>
        one_acc, avg_acc;
    std::vector<std::pair<std::string, std::string>> group_order;
    for (const auto& rec : results) {
        auto group = std::make_pair(rec.dataset, rec.classifier);
        if (std::find(group_order.begin(), group_order.end(), group) == group_order.end())
            group_order.push_back(group);
        auto key = std::make_tuple(rec.dataset, rec.classifier, static_cast<int>(rec.ncf),
                                   rec.epsilon);
        one_acc[key].first += rec.metrics.one_c;
        one_acc[key].second += 1;
        avg_acc[key].first += rec.metrics.avg_c;
        avg_acc[key].second += 1;
    }

    std::map<std::pair<std::string, std::string>, CurveSet> curves;
    for (const auto& group : group_order) {
        CurveSet cs;
        cs.epsilons = epsilons;
        for (int n = 0; n < 3; ++n) {
            for (double eps : epsilons) {
                auto key = std::make_tuple(group.first, group.second, n, eps);
                auto it = one_acc.find(key);
                if (it == one_acc.end()) continue;
                cs.one_c[n].push_back(it->second.first / it->second.second);
                cs.avg_c[n].push_back(avg_acc[key].first / avg_acc[key].second);
            }
        }
        curves[group] = std::move(cs);
    }
    return curves;
}

// line styles matched to the usual rendering: margin dashed, inverse
// probability dash-dot, the combination a thin solid line
const char* kDash[3] = {"8,3,2,3", "", "7,4"};
const double kWidth[3] = {1.4, 1.0, 1.4};

void emit_plots(const std::vector<icp::FoldResult>& results, const fs::path& out_dir) {
    auto curves = collect_curves(results);
    for (const auto& [group, cs] : curves) {
        const auto& [dataset, classifier] = group;
        for (int metric = 0; metric < 2; ++metric) {
            const auto& values = metric == 0 ? cs.one_c : cs.avg_c;
            std::vector<icp::svg::Series> series;
            for (int n : {2, 0, 1}) { // M, IP, IP_M
                icp::svg::Series s;
                s.label = icp::to_string(static_cast<icp::NcfId>(n));
                s.dasharray = kDash[n];
                s.stroke_width = kWidth[n];
                for (std::size_t i = 0; i < values[n].size(); ++i)
                    s.points.emplace_back(cs.epsilons[i], values[n][i]);
                series.push_back(std::move(s));
            }
            std::string metric_name = metric == 0 ? "oneC" : "avgC";
            fs::path file = out_dir / (sanitize(dataset) + "_" + sanitize(classifier) + "_" +
                                       metric_name + ".svg");
            icp::svg::write_line_chart(file.string(), dataset + " / " + classifier + ": " + metric_name,
                                       "epsilon", metric_name, series);
        }
    }
}

unsigned resolve_workers(const std::optional<unsigned>& from_config) {
    if (from_config) return *from_config;
    if (const char* env = std::getenv("ICPBENCH_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
        std::cerr << "warning: ignoring invalid ICPBENCH_WORKERS='" << env << "'\n";
    }
    return 0; // auto
}

int cmd_synth(double sigma, int n_per_class, std::uint64_t seed, const std::string& out_path) {
    if (sigma <= 0) throw icp::ValidationError("--sigma must be positive");
    if (n_per_class <= 0) throw icp::ValidationError("--n must be positive");
    icp::Dataset data = icp::generate_synthetic(sigma, n_per_class, seed);
    icp::save_csv(data, out_path);
    std::cout << "wrote " << data.n_instances() << " instances to " << out_path << "\n";
    return 0;
}

int cmd_run(const std::string& config_path) {
    icp::ExperimentConfig config = icp::parse_config_file(config_path);
    unsigned workers = resolve_workers(config.workers);

    icp::RunOutput out = icp::run_grid(config.grid, workers);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (out.results.empty()) {
        std::cerr << "error: no results produced\n";
        return 2;
    }

    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    icp::write_results_csv((dir / "results.csv").string(), out.results);
    icp::write_validity_csv((dir / "validity.csv").string(),
                            icp::summarize_validity(out.results));
    icp::write_matrices_report((dir / "matrices.md").string(), out.results, out.datasets);
    icp::write_dataset_meta_csv((dir / "datasets_meta.csv").string(), out.datasets);
    if (config.plots) emit_plots(out.results, dir);

    std::cout << "wrote " << out.results.size() << " fold results to "
              << (dir / "results.csv").string() << "\n";
    return 0;
}

int cmd_plot(const std::string& results_path, const std::string& out_dir) {
    std::vector<icp::FoldResult> results = icp::read_results_csv(results_path);
    if (results.empty()) throw std::runtime_error(results_path + ": no result rows");
    fs::path dir(out_dir);
    fs::create_directories(dir);
    emit_plots(results, dir);
    std::cout << "plots written to " << out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& results_path, std::string meta_path, const std::string& out_dir) {
    std::vector<icp::FoldResult> results = icp::read_results_csv(results_path);
    if (results.empty()) throw std::runtime_error(results_path + ": no result rows");
    if (meta_path.empty())
        meta_path = (fs::path(results_path).parent_path() / "datasets_meta.csv").string();
    std::vector<icp::DatasetInfo> meta = icp::read_dataset_meta_csv(meta_path);
    fs::path dir(out_dir);
    fs::create_directories(dir);
    icp::write_validity_csv((dir / "validity.csv").string(), icp::summarize_validity(results));
    icp::write_matrices_report((dir / "matrices.md").string(), results, meta);
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal classification benchmark"};
    app.require_subcommand(1);

    double sigma = 0.6;
    int n_per_class = 2000;
    std::uint64_t seed = 0;
    std::string out_path = "synthetic.csv";
    auto* synth = app.add_subcommand("synth", "generate a synthetic Gaussian-cluster dataset CSV");
    synth->add_option("--sigma", sigma, "cluster standard deviation")->required();
    synth->add_option("--n", n_per_class, "instances per class")->capture_default_str();
    synth->add_option("--seed", seed, "generator seed")->capture_default_str();
    synth->add_option("--out", out_path, "output CSV path")->required();

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the benchmark grid described by a JSON config");
    run->add_option("--config", config_path, "config file")->required();

    std::string results_path, plot_dir;
    auto* plot = app.add_subcommand("plot", "render oneC/avgC line charts from a results CSV");
    plot->add_option("--results", results_path, "results.csv produced by run")->required();
    plot->add_option("--out", plot_dir, "output directory")->required();

    std::string report_results, report_meta, report_dir;
    auto* report = app.add_subcommand("report", "rebuild validity/matrix summaries from a results CSV");
    report->add_option("--results", report_results, "results.csv produced by run")->required();
    report->add_option("--meta", report_meta, "datasets_meta.csv (default: next to results)");
    report->add_option("--out", report_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(sigma, n_per_class, seed, out_path);
        if (run->parsed()) return cmd_run(config_path);
        if (plot->parsed()) return cmd_plot(results_path, plot_dir);
        if (report->parsed()) return cmd_report(report_results, report_meta, report_dir);
    } catch (const icp::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
