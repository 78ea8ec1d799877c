#include "dynarag/config.hpp"

#include "dynarag/error.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dynarag {

using nlohmann::ordered_json;

ordered_json default_config_json() {
    RunConfig defaults;
    return run_config_to_json(defaults);
}

void merge_config(ordered_json& base, const ordered_json& overlay) {
    if (!overlay.is_object() || !base.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
            merge_config(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
}

ordered_json env_overlay() {
    ordered_json overlay = ordered_json::object();
    auto set_nested = [&](const char* var, const char* section, const char* field) {
        if (const char* value = std::getenv(var); value && *value) {
            overlay[section][field] = std::string(value);
        }
    };
    set_nested("DYNARAG_SCORER_URL", "scorer", "url");
    set_nested("DYNARAG_EMBEDDER_URL", "embedder", "url");
    set_nested("DYNARAG_CALLER_URL", "caller", "url");
    set_nested("DYNARAG_GENERATOR_URL", "generator", "url");
    if (const char* token = std::getenv("DYNARAG_API_TOKEN"); token && *token) {
        overlay["api_token"] = std::string(token);
    }
    return overlay;
}

ordered_json resolve_config_layers(const ordered_json& file_overlay, const ordered_json& env,
                                   const ordered_json& flags) {
    ordered_json resolved = default_config_json();
    if (file_overlay.is_object()) merge_config(resolved, file_overlay);
    if (env.is_object()) merge_config(resolved, env);
    if (flags.is_object()) merge_config(resolved, flags);
    return resolved;
}

namespace {

BindingKind binding_kind_from_string(const std::string& s) {
    if (s == "reference") return BindingKind::reference;
    if (s == "remote") return BindingKind::remote;
    throw Error(ErrorCode::config_error, "unknown binding kind \"" + s + "\"");
}

const char* to_string(BindingKind k) {
    return k == BindingKind::reference ? "reference" : "remote";
}

BindingConfig binding_from_json(const ordered_json& j, const char* stage) {
    BindingConfig binding;
    if (!j.is_object()) {
        throw Error(ErrorCode::config_error, std::string(stage) + " binding must be an object");
    }
    if (j.contains("kind")) binding.kind = binding_kind_from_string(j["kind"].get<std::string>());
    if (j.contains("url") && j["url"].is_string()) binding.url = j["url"].get<std::string>();
    if (j.contains("token") && j["token"].is_string()) binding.token = j["token"].get<std::string>();
    if (binding.kind == BindingKind::remote && binding.url.empty()) {
        throw Error(ErrorCode::config_error,
                    std::string("remote ") + stage + " binding requires an endpoint URL");
    }
    return binding;
}

ordered_json binding_to_json(const BindingConfig& binding) {
    return {{"kind", to_string(binding.kind)}, {"url", binding.url}, {"token", binding.token}};
}

template <typename T>
T require_number(const ordered_json& j, const char* key, T min_value) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw Error(ErrorCode::config_error, std::string("config field \"") + key +
                                                 "\" must be a number");
    }
    T value = j[key].get<T>();
    if (value < min_value) {
        throw Error(ErrorCode::config_error, std::string("config field \"") + key +
                                                 "\" must be >= " + std::to_string(min_value));
    }
    return value;
}

} // namespace

RunConfig run_config_from_json(const ordered_json& j) {
    RunConfig config;
    if (!j.is_object()) {
        throw Error(ErrorCode::config_error, "config must be a JSON object");
    }
    if (j.contains("mode")) {
        auto mode = mode_from_string(j["mode"].get<std::string>());
        if (!mode) {
            throw Error(ErrorCode::config_error,
                        "mode must be task1 or task2, got \"" +
                            j["mode"].get<std::string>() + "\"");
        }
        config.pipeline.mode = *mode;
    }
    config.pipeline.k_max = require_number<int>(j, "k_max", 1);
    config.pipeline.top_n = require_number<int>(j, "top_n", 1);
    config.pipeline.top_m = require_number<int>(j, "top_m", 1);
    config.pipeline.token_budget = require_number<int>(j, "token_budget", 1);
    config.pipeline.timeout_ms = require_number<int>(j, "timeout_ms", 1);
    config.parallelism = require_number<int>(j, "parallelism", 1);
    config.pipeline.threshold = require_number<double>(j, "threshold", 0.0);
    if (config.pipeline.threshold > 1.0) {
        throw Error(ErrorCode::config_error, "threshold must lie in [0,1]");
    }

    auto get_string = [&](const char* key) {
        return j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string{};
    };
    config.dataset = get_string("dataset");
    config.catalog = get_string("catalog");
    config.fixtures = get_string("fixtures");
    config.output = j.contains("output") ? get_string("output") : std::string{"out"};
    config.api_token = get_string("api_token");
    config.pipeline.api_token = config.api_token;

    config.scorer = binding_from_json(j.value("scorer", ordered_json::object()), "scorer");
    config.embedder = binding_from_json(j.value("embedder", ordered_json::object()), "embedder");
    config.caller = binding_from_json(j.value("caller", ordered_json::object()), "caller");
    config.generator =
        binding_from_json(j.value("generator", ordered_json::object()), "generator");
    return config;
}

ordered_json run_config_to_json(const RunConfig& config) {
    ordered_json j;
    j["mode"] = to_string(config.pipeline.mode);
    j["threshold"] = config.pipeline.threshold;
    j["top_n"] = config.pipeline.top_n;
    j["top_m"] = config.pipeline.top_m;
    j["k_max"] = config.pipeline.k_max;
    j["token_budget"] = config.pipeline.token_budget;
    j["timeout_ms"] = config.pipeline.timeout_ms;
    j["parallelism"] = config.parallelism;
    j["dataset"] = config.dataset;
    j["catalog"] = config.catalog;
    j["fixtures"] = config.fixtures;
    j["output"] = config.output;
    j["api_token"] = config.api_token;
    j["scorer"] = binding_to_json(config.scorer);
    j["embedder"] = binding_to_json(config.embedder);
    j["caller"] = binding_to_json(config.caller);
    j["generator"] = binding_to_json(config.generator);
    return j;
}

RunConfig resolve_run_config(const std::optional<std::string>& config_file_path,
                             const ordered_json& flag_overlay) {
    ordered_json file_overlay = ordered_json::object();
    if (config_file_path) {
        std::ifstream in(*config_file_path);
        if (!in) {
            throw Error(ErrorCode::config_error, "cannot open config file: " + *config_file_path);
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        file_overlay = ordered_json::parse(buffer.str(), nullptr, false);
        if (file_overlay.is_discarded() || !file_overlay.is_object()) {
            throw Error(ErrorCode::config_error,
                        "config file is not a JSON object: " + *config_file_path);
        }
    }
    return run_config_from_json(resolve_config_layers(file_overlay, env_overlay(), flag_overlay));
}

Bindings make_bindings(const RunConfig& config) {
    auto token_for = [&](const BindingConfig& binding) {
        return binding.token.empty() ? config.api_token : binding.token;
    };
    Bindings bindings;
    bindings.scorer =
        config.scorer.kind == BindingKind::reference
            ? std::shared_ptr<const Scorer>(std::make_shared<LexicalScorer>())
            : std::make_shared<RemoteScorer>(config.scorer.url, token_for(config.scorer),
                                             config.pipeline.timeout_ms);
    bindings.embedder =
        config.embedder.kind == BindingKind::reference
            ? std::shared_ptr<const Embedder>(std::make_shared<HashedBowEmbedder>())
            : std::make_shared<RemoteEmbedder>(config.embedder.url, token_for(config.embedder),
                                               config.pipeline.timeout_ms);
    bindings.caller =
        config.caller.kind == BindingKind::reference
            ? std::shared_ptr<const ToolCaller>(std::make_shared<KeywordToolCaller>())
            : std::make_shared<RemoteToolCaller>(config.caller.url, token_for(config.caller),
                                                 config.pipeline.timeout_ms);
    bindings.generator =
        config.generator.kind == BindingKind::reference
            ? std::shared_ptr<const Generator>(std::make_shared<ExtractiveGenerator>())
            : std::make_shared<RemoteGenerator>(config.generator.url,
                                                token_for(config.generator),
                                                config.pipeline.timeout_ms);
    return bindings;
}

} // namespace dynarag
