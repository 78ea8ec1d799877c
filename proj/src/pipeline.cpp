#include "dynarag/pipeline.hpp"

#include "dynarag/error.hpp"
#include "dynarag/html_cleaner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>
#include <type_traits>

#include <json.hpp>

namespace dynarag {

using nlohmann::ordered_json;

const char* to_string(Mode m) {
    return m == Mode::task1 ? "task1" : "task2";
}

std::optional<Mode> mode_from_string(const std::string& s) {
    if (s == "task1") return Mode::task1;
    if (s == "task2") return Mode::task2;
    return std::nullopt;
}

Bindings Bindings::reference() {
    Bindings b;
    b.scorer = std::make_shared<LexicalScorer>();
    b.embedder = std::make_shared<HashedBowEmbedder>();
    b.caller = std::make_shared<KeywordToolCaller>();
    b.generator = std::make_shared<ExtractiveGenerator>();
    return b;
}

namespace {

class StageClock {
public:
    explicit StageClock(std::map<std::string, double>& timings) : timings_(timings) {}

    template <typename F>
    auto time(const std::string& stage, F&& fn) {
        auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(stage, start);
        } else {
            auto result = fn();
            record(stage, start);
            return result;
        }
    }

private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
        auto elapsed = std::chrono::steady_clock::now() - start;
        timings_[stage] =
            std::chrono::duration<double, std::milli>(elapsed).count();
    }

    std::map<std::string, double>& timings_;
};

void validate_config(const PipelineConfig& cfg) {
    if (cfg.k_max < 1 || cfg.top_n < 1 || cfg.top_m < 1 || cfg.token_budget < 1 ||
        cfg.timeout_ms < 1) {
        throw Error(ErrorCode::config_error, "pipeline sizes and timeouts must be positive");
    }
    if (!std::isfinite(cfg.threshold) || cfg.threshold < 0.0 || cfg.threshold > 1.0) {
        throw Error(ErrorCode::config_error, "threshold must lie in [0,1]");
    }
}

} // namespace

Pipeline::Pipeline(PipelineConfig cfg, Bindings bindings, std::vector<ApiSchema> catalog)
    : cfg_(cfg), bindings_(std::move(bindings)), catalog_(std::move(catalog)) {
    validate_config(cfg_);
    if (!bindings_.scorer || !bindings_.embedder || !bindings_.caller || !bindings_.generator) {
        throw Error(ErrorCode::config_error, "all four bindings must be set");
    }
    if (cfg_.mode == Mode::task2 && catalog_.empty()) {
        throw Error(ErrorCode::config_error, "task2 mode requires a non-empty API catalog");
    }
    if (!catalog_.empty()) {
        index_ = build_index(catalog_, *bindings_.embedder);
    }
}

QueryTrace Pipeline::run_query(const DatasetRecord& record) const {
    QueryTrace trace;
    trace.query_id = record.query.id;
    StageClock clock(trace.stage_timings_ms);

    auto docs = clock.time("retrieve", [&] { return retrieval_set(record); });
    auto snippets = clock.time("clean", [&] { return clean_all(docs); });
    trace.snippets_count = snippets.size();

    trace.ranked = clock.time("rerank", [&] {
        return rerank(record.query, snippets, *bindings_.scorer, cfg_.top_n);
    });
    trace.decision = decide(trace.ranked, cfg_.threshold);

    if (cfg_.mode == Mode::task2 && trace.decision.verdict == Verdict::insufficient) {
        clock.time("api_fallback", [&] {
            try {
                auto candidates = index_.top_m(record.query, cfg_.top_m, *bindings_.embedder);
                ApiCall call = propose_call(record.query, candidates, *bindings_.caller);
                trace.api_call = call; // recorded pre-validation for auditability
                validate(call, catalog_);
                ApiResponse response = execute(call, catalog_, cfg_.timeout_ms, cfg_.api_token);
                if (response.status != ApiStatus::ok) {
                    trace.api_failure = "API call failed: " + response.body;
                }
                trace.api_response = std::move(response);
            } catch (const Error& e) {
                // Caller, validation and embedding failures degrade to
                // static-context generation; the trace keeps the reason.
                trace.api_failure = std::string(error_code_name(e.code())) + ": " + e.what();
            }
        });
    }

    GenerationContext ctx;
    ctx.query = record.query;
    ctx.passages = trace.ranked;
    ctx.token_budget = cfg_.token_budget;
    if (trace.api_response && trace.api_response->status == ApiStatus::ok) {
        ctx.api_response = trace.api_response;
    }

    trace.answer = clock.time("generate", [&] {
        return generate_answer(ctx, *bindings_.generator);
    });
    trace.degraded =
        trace.decision.verdict == Verdict::insufficient && !trace.answer.used_api;
    return trace;
}

std::vector<QueryTrace> Pipeline::run_batch(const std::vector<DatasetRecord>& records,
                                            int parallelism) const {
    if (parallelism < 1) {
        throw Error(ErrorCode::invalid_argument, "parallelism must be >= 1");
    }
    std::vector<QueryTrace> traces(records.size());
    if (records.empty()) return traces;

    auto worker_body = [&](std::size_t i) {
        try {
            traces[i] = run_query(records[i]);
        } catch (const std::exception& e) {
            QueryTrace failed;
            failed.query_id = records[i].query.id;
            failed.error = e.what();
            traces[i] = std::move(failed);
        }
    };

    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(parallelism),
                                                records.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < records.size(); ++i) worker_body(i);
        return traces;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < records.size(); i = next.fetch_add(1)) {
                worker_body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return traces;
}

// ---------------------------------------------------------------------------
// Trace (de)serialization — stable field names, JSONL friendly.
// ---------------------------------------------------------------------------

std::string serialize_trace(const QueryTrace& trace) {
    ordered_json j;
    j["query_id"] = trace.query_id;
    j["snippets_count"] = trace.snippets_count;

    j["ranked"] = ordered_json::array();
    for (const auto& passage : trace.ranked) {
        j["ranked"].push_back({{"url", passage.snippet.source_url},
                               {"source_rank", passage.snippet.source_rank},
                               {"original_index", passage.original_index},
                               {"score", passage.score.value},
                               {"text", passage.snippet.text}});
    }

    j["decision"] = {{"verdict", to_string(trace.decision.verdict)},
                     {"top_score", trace.decision.top_score.value},
                     {"threshold", trace.decision.threshold}};

    if (trace.api_call) {
        j["api_call"] = {{"schema_name", trace.api_call->schema_name},
                         {"arguments", trace.api_call->arguments}};
    } else {
        j["api_call"] = nullptr;
    }
    if (trace.api_response) {
        j["api_response"] = {
            {"status", trace.api_response->status == ApiStatus::ok ? "ok" : "error"},
            {"body", trace.api_response->body},
            {"latency_ms", trace.api_response->latency_ms}};
    } else {
        j["api_response"] = nullptr;
    }
    j["api_failure"] = trace.api_failure ? ordered_json(*trace.api_failure) : ordered_json(nullptr);

    j["answer"] = {{"answer_text", trace.answer.answer_text},
                   {"abstained", trace.answer.abstained},
                   {"used_api", trace.answer.used_api},
                   {"sources", trace.answer.sources}};
    j["degraded"] = trace.degraded;
    j["error"] = trace.error ? ordered_json(*trace.error) : ordered_json(nullptr);
    j["stage_timings_ms"] = trace.stage_timings_ms;
    return j.dump();
}

QueryTrace parse_trace(const std::string& json_line) {
    ordered_json j = ordered_json::parse(json_line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::parse_error, "trace line is not a JSON object");
    }
    QueryTrace trace;
    trace.query_id = j.value("query_id", std::string{});
    trace.snippets_count = j.value("snippets_count", std::size_t{0});

    if (j.contains("ranked") && j["ranked"].is_array()) {
        for (const auto& p : j["ranked"]) {
            RankedPassage passage;
            passage.snippet.source_url = p.value("url", std::string{});
            passage.snippet.source_rank = p.value("source_rank", 1);
            passage.snippet.text = p.value("text", std::string{});
            passage.original_index = p.value("original_index", std::size_t{0});
            passage.score = RelevanceScore(p.value("score", 0.0));
            trace.ranked.push_back(std::move(passage));
        }
    }
    if (j.contains("decision") && j["decision"].is_object()) {
        const auto& d = j["decision"];
        trace.decision.verdict = d.value("verdict", std::string{"insufficient"}) == "sufficient"
                                     ? Verdict::sufficient
                                     : Verdict::insufficient;
        trace.decision.top_score = RelevanceScore(d.value("top_score", 0.0));
        trace.decision.threshold = d.value("threshold", 0.0);
    }
    if (j.contains("api_call") && j["api_call"].is_object()) {
        ApiCall call;
        call.schema_name = j["api_call"].value("schema_name", std::string{});
        if (j["api_call"].contains("arguments")) call.arguments = j["api_call"]["arguments"];
        trace.api_call = std::move(call);
    }
    if (j.contains("api_response") && j["api_response"].is_object()) {
        ApiResponse response;
        response.status = j["api_response"].value("status", std::string{"error"}) == "ok"
                              ? ApiStatus::ok
                              : ApiStatus::error;
        response.body = j["api_response"].value("body", std::string{});
        response.latency_ms = j["api_response"].value("latency_ms", 0LL);
        trace.api_response = std::move(response);
    }
    if (j.contains("api_failure") && j["api_failure"].is_string()) {
        trace.api_failure = j["api_failure"].get<std::string>();
    }
    if (j.contains("answer") && j["answer"].is_object()) {
        const auto& a = j["answer"];
        trace.answer.answer_text = a.value("answer_text", std::string{});
        trace.answer.abstained = a.value("abstained", false);
        trace.answer.used_api = a.value("used_api", false);
        if (a.contains("sources") && a["sources"].is_array()) {
            for (const auto& s : a["sources"]) {
                if (s.is_string()) trace.answer.sources.push_back(s.get<std::string>());
            }
        }
    }
    trace.degraded = j.value("degraded", false);
    if (j.contains("error") && j["error"].is_string()) {
        trace.error = j["error"].get<std::string>();
    }
    if (j.contains("stage_timings_ms") && j["stage_timings_ms"].is_object()) {
        for (auto it = j["stage_timings_ms"].begin(); it != j["stage_timings_ms"].end(); ++it) {
            if (it.value().is_number()) trace.stage_timings_ms[it.key()] = it.value().get<double>();
        }
    }
    return trace;
}

std::vector<QueryTrace> load_traces(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open trace file: " + path);
    std::vector<QueryTrace> traces;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) traces.push_back(parse_trace(line));
    }
    return traces;
}

void save_traces(const std::vector<QueryTrace>& traces, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write trace file: " + path);
    for (const auto& trace : traces) {
        out << serialize_trace(trace) << "\n";
    }
}

} // namespace dynarag
