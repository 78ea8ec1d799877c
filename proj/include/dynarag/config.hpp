#pragma once

#include "dynarag/pipeline.hpp"

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace dynarag {

enum class BindingKind { reference, remote };

struct BindingConfig {
    BindingKind kind = BindingKind::reference;
    std::string url;
    std::string token; // falls back to RunConfig::api_token when empty
};

// Operator-facing configuration. Values resolve with precedence
// flag > env var > config file > default; the config file is JSON with
// the same field names as produced by default_config_json().
struct RunConfig {
    PipelineConfig pipeline;
    int parallelism = 1;
    std::string dataset;
    std::string catalog;
    std::string fixtures;
    std::string output = "out";
    std::string api_token;
    BindingConfig scorer, embedder, caller, generator;
};

nlohmann::ordered_json default_config_json();

// Recursive JSON overlay: object values merge, everything else replaces.
void merge_config(nlohmann::ordered_json& base, const nlohmann::ordered_json& overlay);

// The DYNARAG_* environment variables currently set, as an overlay
// (DYNARAG_SCORER_URL -> scorer.url, ..., DYNARAG_API_TOKEN -> api_token).
nlohmann::ordered_json env_overlay();

// Pure layering core, separated so precedence is testable without
// touching the process environment or filesystem.
nlohmann::ordered_json resolve_config_layers(const nlohmann::ordered_json& file_overlay,
                                             const nlohmann::ordered_json& env,
                                             const nlohmann::ordered_json& flags);

// defaults <- config file (optional) <- environment <- flags, then
// validated. Remote bindings without an endpoint raise config_error.
RunConfig resolve_run_config(const std::optional<std::string>& config_file_path,
                             const nlohmann::ordered_json& flag_overlay);

RunConfig run_config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

// Instantiates the four stage bindings this config selects.
Bindings make_bindings(const RunConfig& config);

} // namespace dynarag
