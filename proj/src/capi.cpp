#include "dynarag.h"

#include "dynarag/config.hpp"
#include "dynarag/error.hpp"
#include "dynarag/eval.hpp"
#include "dynarag/html_cleaner.hpp"
#include "dynarag/mock_server.hpp"
#include "dynarag/pipeline.hpp"
#include "dynarag/schema_index.hpp"
#include "dynarag/sufficiency.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

using nlohmann::ordered_json;

namespace {

thread_local std::string g_last_error;

dynarag_status status_from_code(dynarag::ErrorCode code) {
    using dynarag::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_argument: return DYNARAG_ERR_INVALID_ARGUMENT;
        case ErrorCode::parse_error: return DYNARAG_ERR_PARSE;
        case ErrorCode::io_error: return DYNARAG_ERR_IO;
        case ErrorCode::duplicate_id: return DYNARAG_ERR_DUPLICATE_ID;
        case ErrorCode::rank_collision: return DYNARAG_ERR_RANK_COLLISION;
        case ErrorCode::scorer_failure: return DYNARAG_ERR_SCORER;
        case ErrorCode::embedder_failure: return DYNARAG_ERR_EMBEDDER;
        case ErrorCode::caller_failure: return DYNARAG_ERR_CALLER;
        case ErrorCode::generator_failure: return DYNARAG_ERR_GENERATOR;
        case ErrorCode::hallucinated_api: return DYNARAG_ERR_HALLUCINATED_API;
        case ErrorCode::hallucinated_parameter: return DYNARAG_ERR_HALLUCINATED_PARAMETER;
        case ErrorCode::missing_parameter: return DYNARAG_ERR_MISSING_PARAMETER;
        case ErrorCode::parameter_type_mismatch: return DYNARAG_ERR_TYPE_MISMATCH;
        case ErrorCode::budget_exceeded: return DYNARAG_ERR_BUDGET;
        case ErrorCode::config_error: return DYNARAG_ERR_CONFIG;
        case ErrorCode::internal_error: return DYNARAG_ERR_INTERNAL;
    }
    return DYNARAG_ERR_INTERNAL;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

dynarag_status fail(dynarag_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename F>
dynarag_status guarded(F&& fn) {
    try {
        return fn();
    } catch (const dynarag::Error& e) {
        return fail(status_from_code(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(DYNARAG_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DYNARAG_ERR_INTERNAL, "unknown error");
    }
}

dynarag::RunConfig config_from_cstr(const char* config_json) {
    ordered_json j = ordered_json::parse(config_json, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw dynarag::Error(dynarag::ErrorCode::config_error, "config is not a JSON object");
    }
    // Partial configs are tolerated: missing fields take defaults.
    ordered_json resolved = dynarag::default_config_json();
    dynarag::merge_config(resolved, j);
    return dynarag::run_config_from_json(resolved);
}

} // namespace

struct dynarag_pipeline {
    dynarag::RunConfig config;
    std::unique_ptr<dynarag::Pipeline> pipeline;
};

struct dynarag_mock_server {
    std::unique_ptr<dynarag::MockApiServer> server;
};

extern "C" {

const char* dynarag_version(void) {
    return "0.1.0";
}

const char* dynarag_status_name(dynarag_status status) {
    switch (status) {
        case DYNARAG_OK: return "ok";
        case DYNARAG_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case DYNARAG_ERR_PARSE: return "parse_error";
        case DYNARAG_ERR_IO: return "io_error";
        case DYNARAG_ERR_DUPLICATE_ID: return "duplicate_id";
        case DYNARAG_ERR_RANK_COLLISION: return "rank_collision";
        case DYNARAG_ERR_SCORER: return "scorer_failure";
        case DYNARAG_ERR_EMBEDDER: return "embedder_failure";
        case DYNARAG_ERR_CALLER: return "caller_failure";
        case DYNARAG_ERR_GENERATOR: return "generator_failure";
        case DYNARAG_ERR_HALLUCINATED_API: return "hallucinated_api";
        case DYNARAG_ERR_HALLUCINATED_PARAMETER: return "hallucinated_parameter";
        case DYNARAG_ERR_MISSING_PARAMETER: return "missing_parameter";
        case DYNARAG_ERR_TYPE_MISMATCH: return "parameter_type_mismatch";
        case DYNARAG_ERR_BUDGET: return "budget_exceeded";
        case DYNARAG_ERR_CONFIG: return "config_error";
        case DYNARAG_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* dynarag_last_error(void) {
    return g_last_error.c_str();
}

void dynarag_string_free(char* s) {
    std::free(s);
}

dynarag_status dynarag_resolve_config(const char* config_file_path, const char* flags_json,
                                      char** out_config_json) {
    if (!out_config_json) return fail(DYNARAG_ERR_INVALID_ARGUMENT, "out_config_json is null");
    *out_config_json = nullptr;
    return guarded([&] {
        ordered_json flags = ordered_json::object();
        if (flags_json) {
            flags = ordered_json::parse(flags_json, nullptr, false);
            if (flags.is_discarded() || !flags.is_object()) {
                throw dynarag::Error(dynarag::ErrorCode::config_error,
                                     "flags overlay is not a JSON object");
            }
        }
        std::optional<std::string> path;
        if (config_file_path) path = config_file_path;
        dynarag::RunConfig config = dynarag::resolve_run_config(path, flags);
        *out_config_json = copy_string(dynarag::run_config_to_json(config).dump(2));
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_pipeline_new(const char* config_json, dynarag_pipeline** out_pipeline) {
    if (!config_json || !out_pipeline) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "config_json and out_pipeline are required");
    }
    *out_pipeline = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<dynarag_pipeline>();
        handle->config = config_from_cstr(config_json);

        std::vector<dynarag::ApiSchema> catalog;
        if (!handle->config.catalog.empty()) {
            catalog = dynarag::load_catalog(handle->config.catalog);
        }
        handle->pipeline = std::make_unique<dynarag::Pipeline>(
            handle->config.pipeline, dynarag::make_bindings(handle->config), std::move(catalog));
        *out_pipeline = handle.release();
        return DYNARAG_OK;
    });
}

void dynarag_pipeline_free(dynarag_pipeline* pipeline) {
    delete pipeline;
}

dynarag_status dynarag_pipeline_run_record(dynarag_pipeline* pipeline, const char* record_json,
                                           char** out_trace_json) {
    if (!pipeline || !record_json || !out_trace_json) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "pipeline, record_json and out are required");
    }
    *out_trace_json = nullptr;
    return guarded([&] {
        dynarag::DatasetRecord record = dynarag::parse_record(record_json);
        dynarag::QueryTrace trace = pipeline->pipeline->run_query(record);
        *out_trace_json = copy_string(dynarag::serialize_trace(trace));
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_pipeline_run_file(dynarag_pipeline* pipeline, const char* dataset_path,
                                         const char* trace_out_path, int parallelism,
                                         size_t* out_record_count) {
    if (!pipeline || !dataset_path || !trace_out_path) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "pipeline and paths are required");
    }
    return guarded([&] {
        auto records = dynarag::load_dataset(dataset_path, pipeline->config.pipeline.k_max);
        int workers = parallelism > 0 ? parallelism : pipeline->config.parallelism;
        auto traces = pipeline->pipeline->run_batch(records, workers);
        dynarag::save_traces(traces, trace_out_path);
        if (out_record_count) *out_record_count = traces.size();
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_clean_html(const char* html, char** out_text) {
    if (!html || !out_text) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "html and out_text are required");
    }
    *out_text = nullptr;
    return guarded([&] {
        *out_text = copy_string(dynarag::extract_paragraph_text(html));
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_tune_threshold_file(const char* devset_path, double* out_threshold,
                                           double* out_f1) {
    if (!devset_path || !out_threshold) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "devset_path and out_threshold are required");
    }
    return guarded([&] {
        auto tuned = dynarag::tune_threshold(dynarag::load_dev_set(devset_path));
        *out_threshold = tuned.threshold;
        if (out_f1) *out_f1 = tuned.f1;
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_schema_top_m(const char* catalog_path, const char* query_text, int m,
                                    const char* config_json, char** out_hits_json) {
    if (!catalog_path || !query_text || !out_hits_json) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "catalog_path, query_text and out are required");
    }
    *out_hits_json = nullptr;
    return guarded([&] {
        dynarag::RunConfig config =
            config_json ? config_from_cstr(config_json) : dynarag::RunConfig{};
        auto bindings = dynarag::make_bindings(config);
        auto catalog = dynarag::load_catalog(catalog_path);
        auto index = dynarag::build_index(catalog, *bindings.embedder);

        dynarag::Query query;
        query.id = "adhoc";
        query.text = query_text;
        ordered_json hits = ordered_json::array();
        for (const auto& hit : index.top_m_hits(query, m, *bindings.embedder)) {
            hits.push_back({{"name", hit.schema.name}, {"similarity", hit.similarity}});
        }
        *out_hits_json = copy_string(hits.dump(2));
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_eval_traces(const char* trace_path, const char* dataset_path,
                                   const char* breakdown_key, char** out_report_json) {
    if (!trace_path || !dataset_path || !out_report_json) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "trace_path, dataset_path and out are required");
    }
    *out_report_json = nullptr;
    return guarded([&] {
        std::optional<dynarag::BreakdownKey> key;
        if (breakdown_key) {
            key = dynarag::breakdown_key_from_string(breakdown_key);
            if (!key) {
                throw dynarag::Error(dynarag::ErrorCode::invalid_argument,
                                     std::string("unknown breakdown key \"") + breakdown_key +
                                         "\"");
            }
        }
        auto traces = dynarag::load_traces(trace_path);
        // k_max here only caps documents, which eval never reads.
        auto records = dynarag::load_dataset(dataset_path, 1000000);
        dynarag::EvalReport report = dynarag::evaluate(traces, records, key);

        auto metrics_json = [](const dynarag::EvalMetrics& m) {
            return ordered_json{{"accuracy_pct", m.accuracy_pct},
                                {"hallucination_pct", m.hallucination_pct},
                                {"missing_pct", m.missing_pct},
                                {"n", m.n}};
        };
        ordered_json j;
        j["overall"] = metrics_json(report.overall);
        j["groups"] = ordered_json::object();
        for (const auto& [label, metrics] : report.groups) {
            j["groups"][label] = metrics_json(metrics);
        }
        j["unscored"] = report.unscored;
        j["judgments"] = ordered_json::array();
        for (const auto& judgment : report.judgments) {
            j["judgments"].push_back(
                {{"query_id", judgment.query_id}, {"outcome", dynarag::to_string(judgment.outcome)}});
        }
        j["table"] = dynarag::render_table(report);
        j["csv"] = dynarag::render_csv(report);
        *out_report_json = copy_string(j.dump(2));
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_mock_server_new(const char* catalog_path, const char* fixtures_path,
                                       dynarag_mock_server** out_server) {
    if (!catalog_path || !fixtures_path || !out_server) {
        return fail(DYNARAG_ERR_INVALID_ARGUMENT, "catalog, fixtures and out are required");
    }
    *out_server = nullptr;
    return guarded([&] {
        auto catalog = dynarag::load_catalog(catalog_path);
        auto fixtures = dynarag::load_fixtures(fixtures_path);
        auto handle = std::make_unique<dynarag_mock_server>();
        handle->server =
            std::make_unique<dynarag::MockApiServer>(std::move(catalog), std::move(fixtures));
        *out_server = handle.release();
        return DYNARAG_OK;
    });
}

dynarag_status dynarag_mock_server_start(dynarag_mock_server* server, int port, int* out_port) {
    if (!server) return fail(DYNARAG_ERR_INVALID_ARGUMENT, "server is null");
    return guarded([&] {
        server->server->start(port);
        if (out_port) *out_port = server->server->port();
        return DYNARAG_OK;
    });
}

void dynarag_mock_server_stop(dynarag_mock_server* server) {
    if (server && server->server) server->server->stop();
}

void dynarag_mock_server_free(dynarag_mock_server* server) {
    delete server;
}

} // extern "C"
