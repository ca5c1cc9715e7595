#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "alioth/simulator.hpp"

namespace alioth {

inline constexpr int kSchemaVersion = 1;

// Full config serialization. Every field is optional with defaults; unknown
// keys are rejected at every level. schema_version is required at the top.
nlohmann::json default_config_json();
nlohmann::json config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const nlohmann::json& j);

SimConfig load_config(const std::string& path);
VehicleParams params_from_json(const nlohmann::json& j);

// Applies one "a.b.c=value" override; the dotted path must resolve to an
// existing scalar/array slot in the default-merged document.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Sweep / ablation sections (present in the same schema, used by their
// subcommands only).
struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

struct AblationSpec {
    std::vector<std::uint64_t> seeds{1};
};

SweepSpec sweep_from_json(const nlohmann::json& root);
AblationSpec ablation_from_json(const nlohmann::json& root);

}  // namespace alioth
