#pragma once

#include "dynarag/dataset.hpp"
#include "dynarag/pipeline.hpp"

#include <map>
#include <string>
#include <vector>

namespace dynarag {

enum class Outcome { correct, hallucinated, missing };

const char* to_string(Outcome o);

struct Judgment {
    std::string query_id;
    Outcome outcome = Outcome::missing;
};

struct EvalMetrics {
    double accuracy_pct = 0.0;
    double hallucination_pct = 0.0;
    double missing_pct = 0.0;
    std::size_t n = 0;
};

// Abstention -> missing; otherwise normalized containment of the gold
// answer in the answer text decides correct vs hallucinated. Matching is
// lowercase, punctuation-insensitive, whitespace-collapsed.
Judgment judge(const QueryTrace& trace, const std::string& gold);

// Percentages are 100 * count / n; callers format them to two decimals.
EvalMetrics aggregate(const std::vector<Judgment>& judgments);

enum class BreakdownKey { dynamism, domain, question_type };

std::optional<BreakdownKey> breakdown_key_from_string(const std::string& s);

// Group-wise aggregate; queries lacking the requested label fall into
// "unknown". Groups partition the judgment set.
std::map<std::string, EvalMetrics> breakdown(const std::vector<Judgment>& judgments,
                                             const std::vector<Query>& queries,
                                             BreakdownKey key);

struct MetricsDelta {
    double accuracy = 0.0;       // a - b, absolute percentage points
    double hallucination = 0.0;
    double missing = 0.0;
};

MetricsDelta compare(const EvalMetrics& a, const EvalMetrics& b);
std::string render_comparison(const MetricsDelta& delta);

// Full evaluation: joins traces with dataset records by query id. Traces
// without a gold answer are excluded from the metrics and counted in
// `unscored`.
struct EvalReport {
    EvalMetrics overall;
    std::vector<Judgment> judgments;
    std::map<std::string, EvalMetrics> groups; // empty unless a key was requested
    std::size_t unscored = 0;
};

EvalReport evaluate(const std::vector<QueryTrace>& traces,
                    const std::vector<DatasetRecord>& records,
                    std::optional<BreakdownKey> key = std::nullopt);

// Plain-text table in Acc. / Hall. / Miss. column order, two decimals.
std::string render_table(const EvalReport& report);
std::string render_csv(const EvalReport& report);

} // namespace dynarag
