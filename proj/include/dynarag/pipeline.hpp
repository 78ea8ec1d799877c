#pragma once

#include "dynarag/api_router.hpp"
#include "dynarag/dataset.hpp"
#include "dynarag/generator.hpp"
#include "dynarag/reranker.hpp"
#include "dynarag/schema_index.hpp"
#include "dynarag/sufficiency.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dynarag {

enum class Mode { task1, task2 };

const char* to_string(Mode m);
std::optional<Mode> mode_from_string(const std::string& s);

struct PipelineConfig {
    int k_max = 5;
    int top_n = 3;
    int top_m = 3;
    double threshold = 0.5;
    Mode mode = Mode::task1;
    int token_budget = 4000;
    int timeout_ms = 5000;
    std::string api_token; // bearer token forwarded to executed API calls
};

struct Bindings {
    std::shared_ptr<const Scorer> scorer;
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<const ToolCaller> caller;
    std::shared_ptr<const Generator> generator;

    static Bindings reference(); // deterministic bindings for every stage
};

// Per-query audit record of every stage. `degraded` marks queries whose
// context was judged insufficient and that no successful API response
// rescued; `error` carries the message of a query that failed outright
// (batch runs capture it instead of aborting).
struct QueryTrace {
    std::string query_id;
    std::size_t snippets_count = 0;
    std::vector<RankedPassage> ranked;
    SufficiencyDecision decision;
    std::optional<ApiCall> api_call;
    std::optional<ApiResponse> api_response;
    std::optional<std::string> api_failure; // why the fallback produced no context
    AnswerRecord answer;
    bool degraded = false;
    std::optional<std::string> error;
    std::map<std::string, double> stage_timings_ms;
};

std::string serialize_trace(const QueryTrace& trace);
QueryTrace parse_trace(const std::string& json_line);
std::vector<QueryTrace> load_traces(const std::string& path);
void save_traces(const std::vector<QueryTrace>& traces, const std::string& path);

// Five-stage control flow: retrieve -> clean -> rerank -> sufficiency gate
// -> (API fallback, task2 only) -> generate. The schema index is built once
// per Pipeline and shared by every query; all state is immutable after
// construction, so concurrent run_query calls are safe.
class Pipeline {
public:
    Pipeline(PipelineConfig cfg, Bindings bindings, std::vector<ApiSchema> catalog = {});

    const PipelineConfig& config() const { return cfg_; }
    const std::vector<ApiSchema>& catalog() const { return catalog_; }

    // Tool-path failures (caller, validation, transport) degrade to
    // generation from static passages; only dataset malformation and
    // generator failures abort the query.
    QueryTrace run_query(const DatasetRecord& record) const;

    // One trace per record in input order regardless of completion order;
    // per-query failures are captured in the trace, never aborting the batch.
    std::vector<QueryTrace> run_batch(const std::vector<DatasetRecord>& records,
                                      int parallelism) const;

private:
    PipelineConfig cfg_;
    Bindings bindings_;
    std::vector<ApiSchema> catalog_;
    SchemaIndex index_;
};

} // namespace dynarag
