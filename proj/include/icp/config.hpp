#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "icp/evaluation.hpp"

namespace icp {

// Raised for anything the user can fix in a config file or on the command
// line; the CLI maps it to exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ExperimentGrid grid;
    std::string output_dir = "out";
    std::optional<unsigned> workers;
    bool plots = false;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Inverse of parse_config_text up to JSON formatting.
std::string config_to_json_text(const ExperimentConfig& config);

} // namespace icp
