// Command-line front end. Everything goes through the C API in dynarag.h;
// this file only parses flags, shuttles JSON and formats output.

#include "dynarag.h"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonFlags {
    std::string config_file;
    std::string mode;
    double threshold = 0.0;
    int top_n = 0, top_m = 0, k_max = 0, parallelism = 0;
    int token_budget = 0, timeout_ms = 0;
    std::string dataset, catalog, fixtures, output;
    std::string scorer, embedder, caller, generator;

    CLI::Option* mode_opt = nullptr;
    CLI::Option* threshold_opt = nullptr;
    CLI::Option* top_n_opt = nullptr;
    CLI::Option* top_m_opt = nullptr;
    CLI::Option* k_max_opt = nullptr;
    CLI::Option* parallelism_opt = nullptr;
    CLI::Option* token_budget_opt = nullptr;
    CLI::Option* timeout_opt = nullptr;
    CLI::Option* dataset_opt = nullptr;
    CLI::Option* catalog_opt = nullptr;
    CLI::Option* fixtures_opt = nullptr;
    CLI::Option* output_opt = nullptr;
    CLI::Option* scorer_opt = nullptr;
    CLI::Option* embedder_opt = nullptr;
    CLI::Option* caller_opt = nullptr;
    CLI::Option* generator_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "JSON config file");
    flags.mode_opt = cmd->add_option("--mode", flags.mode, "task1 | task2");
    flags.threshold_opt =
        cmd->add_option("--threshold", flags.threshold, "sufficiency threshold in [0,1]");
    flags.top_n_opt = cmd->add_option("--top-n", flags.top_n, "passages kept after reranking");
    flags.top_m_opt = cmd->add_option("--top-m", flags.top_m, "candidate schemas for fallback");
    flags.k_max_opt = cmd->add_option("--k-max", flags.k_max, "max documents per query");
    flags.parallelism_opt =
        cmd->add_option("--parallelism", flags.parallelism, "concurrent queries in a batch");
    flags.token_budget_opt =
        cmd->add_option("--token-budget", flags.token_budget, "prompt budget in words");
    flags.timeout_opt = cmd->add_option("--timeout-ms", flags.timeout_ms, "HTTP timeout");
    flags.dataset_opt = cmd->add_option("--dataset", flags.dataset, "dataset JSONL file");
    flags.catalog_opt = cmd->add_option("--catalog", flags.catalog, "API schema catalog file");
    flags.fixtures_opt = cmd->add_option("--fixtures", flags.fixtures, "mock fixtures file");
    flags.output_opt = cmd->add_option("--output", flags.output, "output directory");
    flags.scorer_opt = cmd->add_option("--scorer", flags.scorer, "reference | remote");
    flags.embedder_opt = cmd->add_option("--embedder", flags.embedder, "reference | remote");
    flags.caller_opt = cmd->add_option("--caller", flags.caller, "reference | remote");
    flags.generator_opt = cmd->add_option("--generator", flags.generator, "reference | remote");
}

// Only flags the user actually passed enter the overlay, so config-file
// and environment values survive unless explicitly overridden.
ordered_json flag_overlay(const CommonFlags& flags) {
    ordered_json overlay = ordered_json::object();
    auto set_if = [&](CLI::Option* opt, const char* key, auto value) {
        if (opt && opt->count() > 0) overlay[key] = value;
    };
    set_if(flags.mode_opt, "mode", flags.mode);
    set_if(flags.threshold_opt, "threshold", flags.threshold);
    set_if(flags.top_n_opt, "top_n", flags.top_n);
    set_if(flags.top_m_opt, "top_m", flags.top_m);
    set_if(flags.k_max_opt, "k_max", flags.k_max);
    set_if(flags.parallelism_opt, "parallelism", flags.parallelism);
    set_if(flags.token_budget_opt, "token_budget", flags.token_budget);
    set_if(flags.timeout_opt, "timeout_ms", flags.timeout_ms);
    set_if(flags.dataset_opt, "dataset", flags.dataset);
    set_if(flags.catalog_opt, "catalog", flags.catalog);
    set_if(flags.fixtures_opt, "fixtures", flags.fixtures);
    set_if(flags.output_opt, "output", flags.output);
    if (flags.scorer_opt && flags.scorer_opt->count()) overlay["scorer"]["kind"] = flags.scorer;
    if (flags.embedder_opt && flags.embedder_opt->count())
        overlay["embedder"]["kind"] = flags.embedder;
    if (flags.caller_opt && flags.caller_opt->count()) overlay["caller"]["kind"] = flags.caller;
    if (flags.generator_opt && flags.generator_opt->count())
        overlay["generator"]["kind"] = flags.generator;
    return overlay;
}

[[noreturn]] void die(const std::string& context) {
    std::cerr << "error: " << context;
    const char* detail = dynarag_last_error();
    if (detail && *detail) std::cerr << ": " << detail;
    std::cerr << "\n";
    std::exit(1);
}

std::string resolve_config_or_die(const CommonFlags& flags) {
    char* resolved = nullptr;
    const char* file = flags.config_file.empty() ? nullptr : flags.config_file.c_str();
    std::string overlay = flag_overlay(flags).dump();
    if (dynarag_resolve_config(file, overlay.c_str(), &resolved) != DYNARAG_OK) {
        die("resolving configuration");
    }
    std::string out(resolved);
    dynarag_string_free(resolved);
    return out;
}

struct PipelineHandle {
    dynarag_pipeline* ptr = nullptr;
    ~PipelineHandle() { dynarag_pipeline_free(ptr); }
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) die("cannot write " + path.string());
    out << content;
}

// Picks the dataset line whose id or query text matches; empty result when
// nothing matches.
std::string find_record_line(const std::string& dataset_path, const std::string& id,
                             const std::string& query_text) {
    std::ifstream in(dataset_path);
    if (!in) die("cannot open dataset " + dataset_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) continue;
        if (!id.empty() && j.value("id", "") == id) return line;
        if (id.empty() && j.value("query", "") == query_text) return line;
    }
    return {};
}

int cmd_run(const CommonFlags& flags, const std::string& query_text, const std::string& id) {
    std::string config = resolve_config_or_die(flags);
    ordered_json config_json = ordered_json::parse(config);

    PipelineHandle pipeline;
    if (dynarag_pipeline_new(config.c_str(), &pipeline.ptr) != DYNARAG_OK) {
        die("building pipeline");
    }

    std::string record_line;
    std::string dataset = config_json.value("dataset", "");
    if (!dataset.empty()) {
        record_line = find_record_line(dataset, id, query_text);
    }
    if (record_line.empty()) {
        // No matching record: run with an empty retrieval set.
        ordered_json adhoc = {{"id", id.empty() ? "adhoc" : id},
                              {"query", query_text},
                              {"search_results", ordered_json::array()}};
        record_line = adhoc.dump();
    }

    char* trace_cstr = nullptr;
    if (dynarag_pipeline_run_record(pipeline.ptr, record_line.c_str(), &trace_cstr) !=
        DYNARAG_OK) {
        die("running query");
    }
    std::string trace_str(trace_cstr);
    dynarag_string_free(trace_cstr);

    ordered_json trace = ordered_json::parse(trace_str);
    const auto& answer = trace["answer"];
    std::cout << "answer:    " << answer.value("answer_text", "") << "\n";
    std::cout << "verdict:   " << trace["decision"].value("verdict", "") << " (top score "
              << trace["decision"].value("top_score", 0.0) << ", threshold "
              << trace["decision"].value("threshold", 0.0) << ")\n";
    std::cout << "abstained: " << (answer.value("abstained", false) ? "yes" : "no") << "\n";
    std::cout << "used api:  " << (answer.value("used_api", false) ? "yes" : "no") << "\n";

    fs::path out_dir = config_json.value("output", "out");
    fs::create_directories(out_dir);
    fs::path trace_path = out_dir / "trace.jsonl";
    write_file(trace_path, trace_str + "\n");
    std::cout << "trace:     " << trace_path.string() << "\n";
    return 0;
}

int cmd_eval(const CommonFlags& flags, const std::string& dataset_arg,
             const std::string& breakdown) {
    std::string config = resolve_config_or_die(flags);
    ordered_json config_json = ordered_json::parse(config);
    if (!dataset_arg.empty()) config_json["dataset"] = dataset_arg;
    std::string dataset = config_json.value("dataset", "");
    if (dataset.empty()) die("eval needs a dataset (positional or --dataset)");
    config = config_json.dump();

    PipelineHandle pipeline;
    if (dynarag_pipeline_new(config.c_str(), &pipeline.ptr) != DYNARAG_OK) {
        die("building pipeline");
    }

    fs::path out_dir = config_json.value("output", "out");
    fs::create_directories(out_dir);
    fs::path trace_path = out_dir / "traces.jsonl";

    size_t count = 0;
    if (dynarag_pipeline_run_file(pipeline.ptr, dataset.c_str(), trace_path.string().c_str(),
                                  config_json.value("parallelism", 1), &count) != DYNARAG_OK) {
        die("running batch");
    }

    char* report_cstr = nullptr;
    if (dynarag_eval_traces(trace_path.string().c_str(), dataset.c_str(),
                            breakdown.empty() ? nullptr : breakdown.c_str(),
                            &report_cstr) != DYNARAG_OK) {
        die("evaluating traces");
    }
    std::string report_str(report_cstr);
    dynarag_string_free(report_cstr);

    ordered_json report = ordered_json::parse(report_str);
    std::cout << report.value("table", "");
    write_file(out_dir / "metrics.csv", report.value("csv", ""));
    write_file(out_dir / "report.json", report_str + "\n");
    std::cout << "traces:  " << trace_path.string() << "\n";
    std::cout << "metrics: " << (out_dir / "metrics.csv").string() << "\n";
    return 0;
}

int cmd_tune(const std::string& devset_path) {
    double threshold = 0.0, f1 = 0.0;
    if (dynarag_tune_threshold_file(devset_path.c_str(), &threshold, &f1) != DYNARAG_OK) {
        die("tuning threshold");
    }
    std::printf("threshold = %.6f\n", threshold);
    std::printf("f1        = %.6f\n", f1);
    return 0;
}

int cmd_index(const CommonFlags& flags, const std::string& catalog_arg,
              const std::string& query_text, int m) {
    std::string config = resolve_config_or_die(flags);
    ordered_json config_json = ordered_json::parse(config);
    std::string catalog = !catalog_arg.empty() ? catalog_arg : config_json.value("catalog", "");
    if (catalog.empty()) die("index needs a catalog (positional or --catalog)");

    char* hits_cstr = nullptr;
    if (dynarag_schema_top_m(catalog.c_str(), query_text.c_str(), m, config.c_str(),
                             &hits_cstr) != DYNARAG_OK) {
        die("searching schema index");
    }
    ordered_json hits = ordered_json::parse(hits_cstr);
    dynarag_string_free(hits_cstr);
    for (const auto& hit : hits) {
        std::printf("%-40s %.6f\n", hit.value("name", "").c_str(), hit.value("similarity", 0.0));
    }
    return 0;
}

std::atomic<bool> g_stop{false};

void handle_signal(int) {
    g_stop = true;
}

int cmd_mock_apis(const CommonFlags& flags, const std::string& catalog_arg,
                  const std::string& fixtures_arg, int port) {
    std::string config = resolve_config_or_die(flags);
    ordered_json config_json = ordered_json::parse(config);
    std::string catalog = !catalog_arg.empty() ? catalog_arg : config_json.value("catalog", "");
    std::string fixtures =
        !fixtures_arg.empty() ? fixtures_arg : config_json.value("fixtures", "");
    if (catalog.empty() || fixtures.empty()) die("mock-apis needs a catalog and a fixtures file");

    dynarag_mock_server* server = nullptr;
    if (dynarag_mock_server_new(catalog.c_str(), fixtures.c_str(), &server) != DYNARAG_OK) {
        die("starting mock server");
    }
    int bound = 0;
    if (dynarag_mock_server_start(server, port, &bound) != DYNARAG_OK) {
        dynarag_mock_server_free(server);
        die("binding mock server");
    }
    std::printf("mock APIs serving on 127.0.0.1:%d (Ctrl-C to stop)\n", bound);
    std::fflush(stdout);

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    dynarag_mock_server_stop(server);
    dynarag_mock_server_free(server);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic-aware retrieval-augmented QA pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dynarag_version());

    // run
    auto* run = app.add_subcommand("run", "answer a single query");
    CommonFlags run_flags;
    std::string run_query, run_id;
    run->add_option("query", run_query, "query text")->required();
    run->add_option("--id", run_id, "pick the dataset record with this id");
    add_common_flags(run, run_flags);

    // eval
    auto* eval = app.add_subcommand("eval", "run a dataset and report metrics");
    CommonFlags eval_flags;
    std::string eval_dataset, eval_breakdown;
    eval->add_option("dataset_file", eval_dataset, "dataset JSONL file");
    eval->add_option("--breakdown", eval_breakdown, "dynamism | domain | question_type");
    add_common_flags(eval, eval_flags);

    // tune
    auto* tune = app.add_subcommand("tune", "tune the sufficiency threshold");
    std::string tune_devset;
    tune->add_option("devset", tune_devset, "labeled dev-set JSONL file")->required();

    // index
    auto* index = app.add_subcommand("index", "inspect schema retrieval for a query");
    CommonFlags index_flags;
    std::string index_catalog, index_query;
    int index_m = 3;
    index->add_option("catalog_file", index_catalog, "schema catalog file");
    index->add_option("query", index_query, "query text")->required();
    index->add_option("--top-m-hits,-m", index_m, "number of hits to print");
    add_common_flags(index, index_flags);

    // mock-apis
    auto* mock = app.add_subcommand("mock-apis", "serve canned API responses");
    CommonFlags mock_flags;
    std::string mock_catalog, mock_fixtures;
    int mock_port = 8900;
    mock->add_option("catalog_file", mock_catalog, "schema catalog file");
    mock->add_option("fixtures_file", mock_fixtures, "fixtures file");
    mock->add_option("--port", mock_port, "port to serve on (0 = any)");
    add_common_flags(mock, mock_flags);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(run_flags, run_query, run_id);
    if (eval->parsed()) return cmd_eval(eval_flags, eval_dataset, eval_breakdown);
    if (tune->parsed()) return cmd_tune(tune_devset);
    if (index->parsed()) return cmd_index(index_flags, index_catalog, index_query, index_m);
    if (mock->parsed()) return cmd_mock_apis(mock_flags, mock_catalog, mock_fixtures, mock_port);
    return 1;
}
