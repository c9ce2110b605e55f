#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "icp/dataset.hpp"
#include "icp/evaluation.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(ICPBENCH_BIN) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "icp_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// minimal well-formedness check: balanced tags, no bare ampersands
bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '&') {
            std::size_t semi = text.find(';', i);
            if (semi == std::string::npos || semi - i > 8) return false;
            i = semi + 1;
            continue;
        }
        if (text[i] != '<') {
            ++i;
            continue;
        }
        std::size_t close = text.find('>', i);
        if (close == std::string::npos) return false;
        std::string tag = text.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;       // declaration/comment
        if (tag.back() == '/') continue;                    // self-closing
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
        } else {
            stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
        }
    }
    return stack.empty();
}

} // namespace

TEST_CASE("synth writes a loadable deterministic CSV") {
    fs::path out = work_dir() / "s06.csv";
    CHECK(run_cli("synth --sigma 0.6 --n 2000 --seed 42 --out " + out.string()) == 0);

    std::ifstream in(out);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 8001); // header + 8000 rows

    icp::Dataset loaded = icp::load_csv(out.string(), "label");
    icp::Dataset direct = icp::generate_synthetic(0.6, 2000, 42);
    REQUIRE(loaded.n_instances() == direct.n_instances());
    for (std::size_t i = 0; i < loaded.n_instances(); i += 97) {
        CHECK(loaded.row(i)[0] == direct.row(i)[0]);
        CHECK(loaded.row(i)[1] == direct.row(i)[1]);
        CHECK(loaded.label(i) == direct.label(i));
    }
}

TEST_CASE("synth rejects bad input with a usage exit code") {
    fs::path out = work_dir() / "bad.csv";
    CHECK(run_cli("synth --sigma -1 --n 10 --seed 1 --out " + out.string()) == 1);
    CHECK(run_cli("synth --sigma 0.5 --n 0 --seed 1 --out " + out.string()) == 1);
    CHECK(run_cli("synth") == 1); // missing required flags
}

TEST_CASE("run executes a config and emits the output files") {
    fs::path dir = work_dir() / "run_out";
    fs::remove_all(dir);
    fs::path cfg = work_dir() / "run.json";
    {
        std::ofstream out(cfg);
        out << R"({
          "datasets": [{"synthetic": {"sigma": 0.6, "n_per_class": 60}}],
          "classifiers": ["gnb", "knn"],
          "epsilons": [0.05, 0.2],
          "repeats": 1,
          "folds": 5,
          "seed": 11,
          "output_dir": ")" << dir.string() << R"("
        })";
    }
    CHECK(run_cli("run --config " + cfg.string()) == 0);
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "validity.csv"));
    CHECK(fs::exists(dir / "matrices.md"));
    CHECK(fs::exists(dir / "datasets_meta.csv"));

    auto results = icp::read_results_csv((dir / "results.csv").string());
    CHECK(results.size() == 2 * 2 * 5 * 3); // classifiers x eps x folds x setups
}

TEST_CASE("run reports config errors with exit code 1") {
    fs::path cfg = work_dir() / "bad.json";
    {
        std::ofstream out(cfg);
        out << R"({"datasets": [], "classifiers": ["gnb"]})";
    }
    CHECK(run_cli("run --config " + cfg.string()) == 1);

    fs::path cfg2 = work_dir() / "bad_eps.json";
    {
        std::ofstream out(cfg2);
        out << R"({"datasets": [{"synthetic": {"sigma": 0.6}}], "classifiers": ["gnb"],
                   "epsilons": [2.0]})";
    }
    CHECK(run_cli("run --config " + cfg2.string()) == 1);

    CHECK(run_cli("run --config /nonexistent/cfg.json") == 1);
}

TEST_CASE("run exits with a runtime failure when every dataset is unloadable") {
    fs::path cfg = work_dir() / "all_fail.json";
    {
        std::ofstream out(cfg);
        out << R"({"datasets": [{"path": "/nonexistent/a.csv"}, {"path": "/nonexistent/b.csv"}],
                   "classifiers": ["gnb"], "output_dir": "/tmp/icp_all_fail"})";
    }
    CHECK(run_cli("run --config " + cfg.string()) == 2);
}

TEST_CASE("plot renders SVGs per dataset and classifier") {
    // hand-built results: one dataset, one classifier, constant oneC
    std::vector<icp::FoldResult> results;
    for (int fold = 0; fold < 2; ++fold) {
        for (double eps : {0.05, 0.1, 0.2}) {
            for (int n = 0; n < 3; ++n) {
                icp::FoldResult rec;
                rec.dataset = "demo";
                rec.classifier = "gnb";
                rec.ncf = static_cast<icp::NcfId>(n);
                rec.epsilon = eps;
                rec.repeat = 0;
                rec.fold = fold;
                rec.n_test = 10;
                rec.metrics.err = 0.1;
                rec.metrics.one_c = 0.75; // flat line
                rec.metrics.avg_c = 1.0 + eps;
                rec.metrics.e_one_c = std::nullopt; // empty cells must not break plotting
                rec.metrics.n_singletons = 0;
                results.push_back(rec);
            }
        }
    }
    fs::path dir = work_dir() / "plot_in";
    fs::create_directories(dir);
    icp::write_results_csv((dir / "results.csv").string(), results);

    fs::path out = work_dir() / "plot_out";
    fs::remove_all(out);
    CHECK(run_cli("plot --results " + (dir / "results.csv").string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "demo_gnb_oneC.svg"));
    CHECK(fs::exists(out / "demo_gnb_avgC.svg"));

    std::string svg = slurp(out / "demo_gnb_oneC.svg");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(xml_well_formed(svg));
    CHECK(xml_well_formed(slurp(out / "demo_gnb_avgC.svg")));

    // flat metric: every polyline point shares one y coordinate
    auto pos = svg.find("points=\"");
    REQUIRE(pos != std::string::npos);
    auto end = svg.find('"', pos + 8);
    std::istringstream pts(svg.substr(pos + 8, end - pos - 8));
    std::string pair;
    std::string first_y;
    while (pts >> pair) {
        std::string y = pair.substr(pair.find(',') + 1);
        if (first_y.empty()) first_y = y;
        CHECK(y == first_y);
    }
}

TEST_CASE("plot fails cleanly on a missing or corrupt results file") {
    CHECK(run_cli("plot --results /nonexistent/results.csv --out /tmp/icp_none") == 2);

    fs::path bad = work_dir() / "corrupt.csv";
    {
        std::ofstream out(bad);
        out << "dataset,classifier,ncf,epsilon,repeat,fold,n_test,err,oneC,avgC,e_oneC,n_singletons\n";
        out << "d,c,IP,not-a-number,0,0,10,0.1,0.5,1.5,,3\n";
    }
    CHECK(run_cli("plot --results " + bad.string() + " --out /tmp/icp_none") == 2);
}

TEST_CASE("report rebuilds the summaries from results.csv") {
    fs::path dir = work_dir() / "report_src";
    fs::remove_all(dir);
    fs::path cfg = work_dir() / "report.json";
    {
        std::ofstream out(cfg);
        out << R"({
          "datasets": [{"synthetic": {"sigma": 0.8, "n_per_class": 50}}],
          "classifiers": ["gnb"],
          "epsilons": [0.05, 0.2],
          "repeats": 1,
          "folds": 5,
          "seed": 3,
          "output_dir": ")" << dir.string() << R"("
        })";
    }
    REQUIRE(run_cli("run --config " + cfg.string()) == 0);

    fs::path rebuilt = work_dir() / "report_out";
    fs::remove_all(rebuilt);
    CHECK(run_cli("report --results " + (dir / "results.csv").string() + " --out " +
                  rebuilt.string()) == 0);
    CHECK(slurp(rebuilt / "validity.csv") == slurp(dir / "validity.csv"));
    CHECK(slurp(rebuilt / "matrices.md") == slurp(dir / "matrices.md"));
}
