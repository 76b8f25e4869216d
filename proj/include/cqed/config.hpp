#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/analysis.hpp"
#include "cqed/errors.hpp"

namespace cqed {

/// Invalid experiment configuration; `field` is the dotted path of the
/// offending key (empty for whole-document errors).
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string field, const std::string& message)
        : InvalidArgument(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct SweepConfig {
    std::vector<SweepAxis> axes;
    Diagnostic diagnostic = Diagnostic::Lyapunov;
    std::size_t max_cells = kDefaultMaxCells;
};

struct ExperimentConfig {
    Experiment experiment;
    SweepConfig sweep;
    std::string output_path = "cqed_out";
};

/// Parses a configuration document.  Unknown keys are rejected; absent keys
/// take their defaults.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a JSON file.  Syntax errors carry line and column.
ExperimentConfig load_config(const std::string& path);

/// Full configuration with every default materialized.  Feeding the result
/// back through parse_config yields an identical configuration.
nlohmann::json to_json(const ExperimentConfig& cfg);

} // namespace cqed
