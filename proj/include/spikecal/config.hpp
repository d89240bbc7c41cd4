#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikecal/montecarlo.hpp"
#include "spikecal/smoter.hpp"

namespace spikecal {

enum class PcaFitOn { Lab, LabAndField };

struct RunConfig {
    std::filesystem::path lab_path;
    std::filesystem::path field_path;
    std::filesystem::path out_dir = "out";
    bool reflectance_percent = false;

    montecarlo::PipelineConfig pipeline;
    smoter::SmoteParams smote;
    std::size_t reps = 100;
    unsigned threads = 1;

    PcaFitOn pca_fit_on = PcaFitOn::LabAndField;
    std::size_t pca_components = 2;

    /// Checks that the given input paths exist and that out_dir can be created.
    void validate_paths(bool need_lab, bool need_field) const;
};

/// Every key understood in a config file, in the order `effective_config` writes them.
const std::vector<std::string>& config_keys();

/// Built-in defaults, then the flat `key = value` file (if any), then overrides in order.
/// Unknown keys and malformed values throw ConfigError; unknown keys name the closest known key.
RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Applies one `key = value` setting.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// `key = value` lines for every key.
std::string effective_config(const RunConfig& cfg);

} // namespace spikecal
