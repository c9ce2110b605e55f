#include "icp/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace icp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ValidationError("config field '" + field + "': " + why);
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
}

std::uint64_t get_seed(const json& j, const std::string& field) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        auto v = j.get<std::int64_t>();
        if (v < 0) fail(field, "must be non-negative");
        return static_cast<std::uint64_t>(v);
    }
    fail(field, "expected an integer");
}

DatasetSource parse_dataset(const json& j, std::size_t index) {
    const std::string field = "datasets[" + std::to_string(index) + "]";
    if (!j.is_object()) fail(field, "expected an object");
    DatasetSource source;
    if (j.contains("synthetic")) {
        const json& s = j.at("synthetic");
        if (!s.is_object()) fail(field + ".synthetic", "expected an object");
        SyntheticSpec spec;
        if (!s.contains("sigma")) fail(field + ".synthetic.sigma", "required");
        spec.sigma = get_number(s.at("sigma"), field + ".synthetic.sigma");
        if (s.contains("n_per_class"))
            spec.n_per_class = get_int(s.at("n_per_class"), field + ".synthetic.n_per_class");
        if (s.contains("seed")) spec.seed = get_seed(s.at("seed"), field + ".synthetic.seed");
        source.source = spec;
        source.id = j.contains("id") ? get_string(j.at("id"), field + ".id")
                                     : "synth-" + format_double(spec.sigma);
    } else if (j.contains("path")) {
        CsvSpec spec;
        spec.path = get_string(j.at("path"), field + ".path");
        if (j.contains("label")) spec.label_column = get_string(j.at("label"), field + ".label");
        std::string stem = spec.path;
        if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
            stem = stem.substr(slash + 1);
        if (auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0)
            stem = stem.substr(0, dot);
        source.source = spec;
        source.id = j.contains("id") ? get_string(j.at("id"), field + ".id") : stem;
    } else {
        fail(field, "expected either 'path' or 'synthetic'");
    }
    return source;
}

ClassifierEntry parse_classifier(const json& j, std::size_t index) {
    const std::string field = "classifiers[" + std::to_string(index) + "]";
    ClassifierEntry entry;
    std::string kind;
    if (j.is_string()) {
        kind = j.get<std::string>();
    } else if (j.is_object()) {
        if (!j.contains("kind")) fail(field + ".kind", "required");
        kind = get_string(j.at("kind"), field + ".kind");
        if (j.contains("k_neighbors"))
            entry.spec.k_neighbors = get_int(j.at("k_neighbors"), field + ".k_neighbors");
        if (j.contains("min_samples_split_floor"))
            entry.spec.min_samples_split_floor =
                get_int(j.at("min_samples_split_floor"), field + ".min_samples_split_floor");
        if (j.contains("min_samples_split_fraction"))
            entry.spec.min_samples_split_fraction =
                get_number(j.at("min_samples_split_fraction"), field + ".min_samples_split_fraction");
        if (j.contains("variance_smoothing"))
            entry.spec.variance_smoothing =
                get_number(j.at("variance_smoothing"), field + ".variance_smoothing");
    } else {
        fail(field, "expected a string or an object");
    }
    try {
        entry.spec.kind = classifier_kind_from_string(kind);
    } catch (const std::exception& e) {
        fail(field + ".kind", e.what());
    }
    entry.id = j.is_object() && j.contains("id") ? get_string(j.at("id"), field + ".id") : kind;
    return entry;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config: top level must be an object");

    ExperimentConfig config;
    if (!j.contains("datasets") || !j.at("datasets").is_array() || j.at("datasets").empty())
        fail("datasets", "a non-empty array is required");
    for (std::size_t i = 0; i < j.at("datasets").size(); ++i)
        config.grid.datasets.push_back(parse_dataset(j.at("datasets")[i], i));

    if (!j.contains("classifiers") || !j.at("classifiers").is_array() || j.at("classifiers").empty())
        fail("classifiers", "a non-empty array is required");
    for (std::size_t i = 0; i < j.at("classifiers").size(); ++i)
        config.grid.classifiers.push_back(parse_classifier(j.at("classifiers")[i], i));

    if (j.contains("epsilons")) {
        if (!j.at("epsilons").is_array()) fail("epsilons", "expected an array");
        config.grid.epsilons.clear();
        for (std::size_t i = 0; i < j.at("epsilons").size(); ++i)
            config.grid.epsilons.push_back(
                get_number(j.at("epsilons")[i], "epsilons[" + std::to_string(i) + "]"));
    }
    if (j.contains("repeats")) config.grid.plan.repeats = get_int(j.at("repeats"), "repeats");
    if (j.contains("folds")) config.grid.plan.folds = get_int(j.at("folds"), "folds");
    if (j.contains("calibration_fraction"))
        config.grid.plan.calibration_fraction =
            get_number(j.at("calibration_fraction"), "calibration_fraction");
    if (j.contains("seed")) config.grid.plan.seed = get_seed(j.at("seed"), "seed");
    if (j.contains("workers")) {
        int w = get_int(j.at("workers"), "workers");
        if (w < 1) fail("workers", "must be >= 1");
        config.workers = static_cast<unsigned>(w);
    }
    if (j.contains("output_dir")) config.output_dir = get_string(j.at("output_dir"), "output_dir");
    if (j.contains("plots")) {
        if (!j.at("plots").is_boolean()) fail("plots", "expected a boolean");
        config.plots = j.at("plots").get<bool>();
    }

    try {
        validate_grid(config.grid);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("config field '") + e.what() + "'");
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& config) {
    json j;
    j["datasets"] = json::array();
    for (const auto& d : config.grid.datasets) {
        json jd;
        jd["id"] = d.id;
        if (const auto* csv = std::get_if<CsvSpec>(&d.source)) {
            jd["path"] = csv->path;
            jd["label"] = csv->label_column;
        } else {
            const auto& syn = std::get<SyntheticSpec>(d.source);
            jd["synthetic"]["sigma"] = syn.sigma;
            jd["synthetic"]["n_per_class"] = syn.n_per_class;
            if (syn.seed) jd["synthetic"]["seed"] = *syn.seed;
        }
        j["datasets"].push_back(jd);
    }
    j["classifiers"] = json::array();
    for (const auto& c : config.grid.classifiers) {
        json jc;
        jc["id"] = c.id;
        jc["kind"] = to_string(c.spec.kind);
        jc["k_neighbors"] = c.spec.k_neighbors;
        jc["min_samples_split_floor"] = c.spec.min_samples_split_floor;
        jc["min_samples_split_fraction"] = c.spec.min_samples_split_fraction;
        jc["variance_smoothing"] = c.spec.variance_smoothing;
        j["classifiers"].push_back(jc);
    }
    j["epsilons"] = config.grid.epsilons;
    j["repeats"] = config.grid.plan.repeats;
    j["folds"] = config.grid.plan.folds;
    j["calibration_fraction"] = config.grid.plan.calibration_fraction;
    j["seed"] = config.grid.plan.seed;
    if (config.workers) j["workers"] = *config.workers;
    j["output_dir"] = config.output_dir;
    j["plots"] = config.plots;
    return j.dump(2);
}

} // namespace icp
