#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "icp/config.hpp"
#include "icp/evaluation.hpp"
#include "icp/report.hpp"

using namespace icp;

namespace {

ExperimentGrid small_grid(double sigma, int n_per_class, std::vector<std::string> classifiers,
                          std::vector<double> epsilons, int repeats, int folds, std::uint64_t seed) {
    ExperimentGrid grid;
    DatasetSource ds;
    ds.id = "synth-" + format_double(sigma);
    ds.source = SyntheticSpec{sigma, n_per_class, seed + 1};
    grid.datasets.push_back(ds);
    for (const auto& c : classifiers)
        grid.classifiers.push_back({c, ClassifierSpec{classifier_kind_from_string(c)}});
    grid.epsilons = std::move(epsilons);
    grid.plan = SplitPlan{repeats, folds, 0.2, seed};
    return grid;
}

} // namespace

TEST_CASE("threshold_compare applies the 2% rule") {
    CHECK(threshold_compare(0.85, 0.80, MetricKind::one_c, 4) == Comparison::better);
    CHECK(threshold_compare(0.80, 0.85, MetricKind::one_c, 4) == Comparison::worse);
    CHECK(threshold_compare(0.81, 0.80, MetricKind::one_c, 4) == Comparison::neither);
    // avgC scales the threshold by the class count and lower is better
    CHECK(threshold_compare(1.50, 1.55, MetricKind::avg_c, 4) == Comparison::neither);
    CHECK(threshold_compare(1.50, 1.60, MetricKind::avg_c, 4) == Comparison::better);
    CHECK(threshold_compare(1.60, 1.50, MetricKind::avg_c, 4) == Comparison::worse);
    CHECK(threshold_compare(1.50, 1.55, MetricKind::avg_c, 2) == Comparison::better);
}

TEST_CASE("run_grid produces the full factorial of records") {
    ExperimentGrid grid = small_grid(0.6, 25, {"knn"}, {0.01, 0.05, 0.1, 0.15, 0.2}, 10, 10, 5);
    RunOutput out = run_grid(grid, 2);
    CHECK(out.warnings.empty());
    CHECK(out.results.size() == 1500); // 1 dataset x 1 classifier x 5 eps x 100 folds x 3 setups
    REQUIRE(out.datasets.size() == 1);
    CHECK(out.datasets[0].n_classes == 4);
    CHECK(out.datasets[0].n_instances == 100);
}

TEST_CASE("run_grid is deterministic across runs and worker counts") {
    ExperimentGrid grid = small_grid(0.8, 40, {"knn", "gnb"}, {0.05, 0.1}, 2, 5, 77);
    RunOutput a = run_grid(grid, 1);
    RunOutput b = run_grid(grid, 4);
    RunOutput c = run_grid(grid, 1);
    CHECK(a.results == b.results);
    CHECK(a.results == c.results);
}

TEST_CASE("run_grid validity near the nominal level") {
    ExperimentGrid grid = small_grid(0.6, 300, {"gnb"}, {0.01, 0.05, 0.1, 0.15, 0.2}, 2, 5, 2024);
    RunOutput out = run_grid(grid, 0);
    std::map<std::pair<int, double>, std::pair<double, int>> acc;
    for (const auto& rec : out.results) {
        auto& cell = acc[{static_cast<int>(rec.ncf), rec.epsilon}];
        cell.first += rec.metrics.err;
        cell.second += 1;
    }
    REQUIRE(acc.size() == 15);
    for (const auto& [key, cell] : acc) {
        double mean_err = cell.first / cell.second;
        CHECK(std::abs(mean_err - key.second) <= 0.02);
    }
}

TEST_CASE("run_grid error never exceeds the significance level by more than slack") {
    // conservative deviations (err below eps) are expected for tie-heavy
    // score distributions like knn's; the guarantee is one-sided
    std::map<std::pair<int, double>, std::pair<double, int>> acc;
    for (double sigma : {0.4, 0.6, 0.8, 1.0}) {
        ExperimentGrid grid =
            small_grid(sigma, 400, {"knn", "gnb", "dtree"}, {0.01, 0.05, 0.1, 0.15, 0.2}, 1, 5, 83);
        RunOutput out = run_grid(grid, 0);
        for (const auto& rec : out.results) {
            auto& cell = acc[{static_cast<int>(rec.ncf), rec.epsilon}];
            cell.first += rec.metrics.err;
            cell.second += 1;
        }
    }
    for (const auto& [key, cell] : acc) {
        double pooled = cell.first / cell.second;
        CHECK(pooled <= key.second + 0.02);
    }
}

TEST_CASE("run_grid dominance of the combination per fold") {
    ExperimentGrid grid = small_grid(1.0, 60, {"knn"}, {0.05, 0.1, 0.2}, 2, 5, 31);
    RunOutput out = run_grid(grid, 0);
    std::map<std::tuple<int, int, double>, double> ip_one_c;
    for (const auto& rec : out.results)
        if (rec.ncf == NcfId::ip) ip_one_c[{rec.repeat, rec.fold, rec.epsilon}] = rec.metrics.one_c;
    std::size_t checked = 0;
    for (const auto& rec : out.results) {
        if (rec.ncf != NcfId::ip_m) continue;
        CHECK(rec.metrics.one_c >= ip_one_c.at({rec.repeat, rec.fold, rec.epsilon}));
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("run_grid skips failing datasets but keeps the rest") {
    ExperimentGrid grid = small_grid(0.6, 30, {"gnb"}, {0.1}, 1, 5, 9);
    DatasetSource broken;
    broken.id = "missing";
    broken.source = CsvSpec{"/nonexistent/file.csv", "label"};
    grid.datasets.push_back(broken);
    RunOutput out = run_grid(grid, 0);
    REQUIRE(out.warnings.size() == 1);
    CHECK(out.warnings[0].find("missing") != std::string::npos);
    CHECK(out.results.size() == 15); // the synthetic dataset still ran
    CHECK(out.datasets.size() == 1);
}

TEST_CASE("build_matrix fills cells by threshold or significance") {
    // identical vectors: all empty
    std::array<std::vector<double>, 3> same = {
        std::vector<double>{0.5, 0.6, 0.7, 0.5},
        std::vector<double>{0.5, 0.6, 0.7, 0.5},
        std::vector<double>{0.5, 0.6, 0.7, 0.5},
    };
    ComparisonMatrix empty_matrix = build_matrix(same, MetricKind::one_c, 4);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(empty_matrix.cells[r][c] == MatrixCell{});

    // M beats IP and IP_M by a stable 0.05: plus-starred, antisymmetric
    std::array<std::vector<double>, 3> m_wins = {
        std::vector<double>{0.80, 0.81, 0.79, 0.80},
        std::vector<double>{0.80, 0.81, 0.79, 0.80},
        std::vector<double>{0.85, 0.86, 0.84, 0.85},
    };
    ComparisonMatrix mat = build_matrix(m_wins, MetricKind::one_c, 4);
    CHECK(mat.cells[2][0] == MatrixCell{1, true});
    CHECK(mat.cells[0][2] == MatrixCell{-1, true});
    CHECK(mat.cells[2][1] == MatrixCell{1, true});
    CHECK(mat.cells[1][2] == MatrixCell{-1, true});
    CHECK(mat.cells[0][1] == MatrixCell{});
    CHECK(mat.cells[0][0] == MatrixCell{});

    // 3% mean difference but too noisy for significance: unstarred signs
    std::array<std::vector<double>, 3> noisy = {
        std::vector<double>{0.83, 0.29, 0.61, 0.47},
        std::vector<double>{0.83, 0.29, 0.61, 0.47},
        std::vector<double>{0.29, 0.85, 0.40, 0.78},
    };
    double mean_ip = (0.83 + 0.29 + 0.61 + 0.47) / 4;
    double mean_m = (0.29 + 0.85 + 0.40 + 0.78) / 4;
    REQUIRE(std::abs(mean_m - mean_ip) > 0.02);
    ComparisonMatrix loose = build_matrix(noisy, MetricKind::one_c, 4);
    CHECK(loose.cells[2][0].sign == (mean_m > mean_ip ? 1 : -1));
    CHECK_FALSE(loose.cells[2][0].starred);
    CHECK(loose.cells[0][2].sign == -loose.cells[2][0].sign);

    // avgC: lower is better
    std::array<std::vector<double>, 3> avg = {
        std::vector<double>{1.50, 1.51, 1.49, 1.50},
        std::vector<double>{1.50, 1.51, 1.49, 1.50},
        std::vector<double>{1.60, 1.61, 1.59, 1.60},
    };
    ComparisonMatrix avg_mat = build_matrix(avg, MetricKind::avg_c, 4);
    CHECK(avg_mat.cells[0][2] == MatrixCell{1, true});  // IP better: lower avgC
    CHECK(avg_mat.cells[2][0] == MatrixCell{-1, true});

    std::array<std::vector<double>, 3> short_m = {std::vector<double>{1.0},
                                                  std::vector<double>{1.0},
                                                  std::vector<double>{1.0}};
    CHECK_THROWS_AS(build_matrix(short_m, MetricKind::one_c, 4), std::invalid_argument);
}

TEST_CASE("build_matrix is antisymmetric for arbitrary inputs") {
    std::mt19937 rng(67);
    for (int t = 0; t < 100; ++t) {
        std::array<std::vector<double>, 3> per_ncf;
        std::size_t folds = 2 + rng() % 8;
        for (auto& v : per_ncf)
            for (std::size_t i = 0; i < folds; ++i) v.push_back((rng() % 100) * 0.01);
        MetricKind metric = t % 2 == 0 ? MetricKind::one_c : MetricKind::avg_c;
        ComparisonMatrix m = build_matrix(per_ncf, metric, 4);
        for (int r = 0; r < 3; ++r) {
            CHECK(m.cells[r][r] == MatrixCell{});
            for (int c = 0; c < 3; ++c) {
                CHECK(m.cells[r][c].sign == -m.cells[c][r].sign);
                CHECK(m.cells[r][c].starred == m.cells[c][r].starred);
            }
        }
    }
}

TEST_CASE("summarize_validity groups by dataset with a MEAN block") {
    std::vector<FoldResult> results;
    FoldResult rec;
    rec.dataset = "d1";
    rec.classifier = "gnb";
    rec.epsilon = 0.1;
    rec.n_test = 10;
    for (int n = 0; n < 3; ++n) {
        rec.ncf = static_cast<NcfId>(n);
        rec.metrics.err = 0.07;
        results.push_back(rec);
    }
    auto rows = summarize_validity(results);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].dataset == "d1");
    CHECK(rows[0].err[0] == doctest::Approx(0.07));
    CHECK(rows[1].dataset == "MEAN");
    CHECK(rows[1].err[2] == doctest::Approx(0.07));
}

TEST_CASE("results csv round trip is exact") {
    ExperimentGrid grid = small_grid(0.7, 30, {"dtree"}, {0.05, 0.15}, 1, 5, 55);
    RunOutput out = run_grid(grid, 0);
    auto path = std::filesystem::temp_directory_path() / "icp_results_roundtrip.csv";
    write_results_csv(path.string(), out.results);
    auto back = read_results_csv(path.string());
    CHECK(back == out.results);
}

TEST_CASE("results csv rejects malformed rows") {
    auto path = std::filesystem::temp_directory_path() / "icp_results_bad.csv";
    {
        std::ofstream out(path);
        out << "dataset,classifier,ncf,epsilon,repeat,fold,n_test,err,oneC,avgC,e_oneC,n_singletons\n";
        out << "d,c,IP,0.1,0,0,10,0.1,0.5,1.5,,3\n";
        out << "d,c,IP,zzz,0,0,10,0.1,0.5,1.5,,3\n";
    }
    CHECK_THROWS_WITH_AS(read_results_csv(path.string()), doctest::Contains("line 3"),
                         std::runtime_error);
}

TEST_CASE("dataset meta csv round trip") {
    std::vector<DatasetInfo> infos = {{"a", 4, 100, 2}, {"b", 3, 50, 7}};
    auto path = std::filesystem::temp_directory_path() / "icp_meta_roundtrip.csv";
    write_dataset_meta_csv(path.string(), infos);
    auto back = read_dataset_meta_csv(path.string());
    REQUIRE(back.size() == 2);
    CHECK(back[1].id == "b");
    CHECK(back[1].n_classes == 3);
    CHECK(back[1].n_instances == 50);
    CHECK(back[1].n_features == 7);
}

TEST_CASE("validate_grid names the offending field") {
    ExperimentGrid grid = small_grid(0.6, 30, {"gnb"}, {0.1}, 1, 5, 1);
    grid.epsilons = {0.5, 0.2};
    CHECK_THROWS_WITH_AS(validate_grid(grid), doctest::Contains("epsilons"), std::invalid_argument);
    grid.epsilons = {0.0};
    CHECK_THROWS_WITH_AS(validate_grid(grid), doctest::Contains("epsilons"), std::invalid_argument);
    grid.epsilons = {0.1};
    grid.plan.calibration_fraction = 1.5;
    CHECK_THROWS_WITH_AS(validate_grid(grid), doctest::Contains("calibration_fraction"),
                         std::invalid_argument);
    grid.plan.calibration_fraction = 0.2;
    grid.datasets.push_back(grid.datasets[0]);
    CHECK_THROWS_WITH_AS(validate_grid(grid), doctest::Contains("duplicate"), std::invalid_argument);
}

TEST_CASE("config json round trip") {
    ExperimentConfig config;
    config.grid = small_grid(0.9, 80, {"knn", "gnb", "dtree"}, {0.01, 0.1}, 3, 4, 99);
    DatasetSource csv_ds;
    csv_ds.id = "mydata";
    csv_ds.source = CsvSpec{"data/my.csv", "target"};
    config.grid.datasets.push_back(csv_ds);
    config.output_dir = "out/exp1";
    config.workers = 3;
    config.plots = true;

    std::string text = config_to_json_text(config);
    ExperimentConfig back = parse_config_text(text);
    CHECK(back == config);
}

TEST_CASE("config parser reports bad fields") {
    CHECK_THROWS_WITH_AS(parse_config_text("{"), doctest::Contains("parse error"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config_text("{}"), doctest::Contains("datasets"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"datasets":[{"synthetic":{"sigma":0.6}}],"classifiers":["svm"]})"),
        doctest::Contains("kind"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(
            R"({"datasets":[{"synthetic":{"sigma":0.6}}],"classifiers":["gnb"],"epsilons":[1.5]})"),
        doctest::Contains("epsilons"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_config_text(R"({"datasets":[],"classifiers":["gnb"]})"),
        doctest::Contains("datasets"), ValidationError);
}

TEST_CASE("report files render") {
    ExperimentGrid grid = small_grid(0.8, 60, {"gnb", "knn"}, {0.05, 0.2}, 2, 5, 123);
    RunOutput out = run_grid(grid, 0);
    auto dir = std::filesystem::temp_directory_path() / "icp_report_test";
    std::filesystem::create_directories(dir);
    write_validity_csv((dir / "validity.csv").string(), summarize_validity(out.results));
    write_matrices_report((dir / "matrices.md").string(), out.results, out.datasets);

    std::ifstream v(dir / "validity.csv");
    std::string header;
    std::getline(v, header);
    CHECK(header == "dataset,epsilon,IP,IP_M,M");

    std::ifstream m(dir / "matrices.md");
    std::string all((std::istreambuf_iterator<char>(m)), std::istreambuf_iterator<char>());
    CHECK(all.find("## Validity") != std::string::npos);
    CHECK(all.find("## Comparison matrices") != std::string::npos);
    CHECK(all.find("synth-0.8 / gnb") != std::string::npos);
    CHECK(all.find("#### oneC") != std::string::npos);
}
