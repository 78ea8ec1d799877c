#include "dynarag/eval.hpp"

#include "dynarag/error.hpp"
#include "dynarag/text.hpp"

#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace dynarag {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::correct: return "correct";
        case Outcome::hallucinated: return "hallucinated";
        case Outcome::missing: return "missing";
    }
    return "missing";
}

Judgment judge(const QueryTrace& trace, const std::string& gold) {
    if (gold.empty()) {
        throw Error(ErrorCode::invalid_argument, "gold answer must be non-empty");
    }
    Judgment judgment;
    judgment.query_id = trace.query_id;
    if (trace.answer.abstained) {
        judgment.outcome = Outcome::missing;
        return judgment;
    }
    std::string answer = text::normalize_for_match(trace.answer.answer_text);
    std::string needle = text::normalize_for_match(gold);
    judgment.outcome = (!needle.empty() && answer.find(needle) != std::string::npos)
                           ? Outcome::correct
                           : Outcome::hallucinated;
    return judgment;
}

EvalMetrics aggregate(const std::vector<Judgment>& judgments) {
    if (judgments.empty()) {
        throw Error(ErrorCode::invalid_argument, "cannot aggregate an empty judgment set");
    }
    std::size_t correct = 0, hallucinated = 0, missing = 0;
    for (const auto& judgment : judgments) {
        switch (judgment.outcome) {
            case Outcome::correct: ++correct; break;
            case Outcome::hallucinated: ++hallucinated; break;
            case Outcome::missing: ++missing; break;
        }
    }
    EvalMetrics metrics;
    metrics.n = judgments.size();
    double n = static_cast<double>(metrics.n);
    metrics.accuracy_pct = 100.0 * static_cast<double>(correct) / n;
    metrics.hallucination_pct = 100.0 * static_cast<double>(hallucinated) / n;
    metrics.missing_pct = 100.0 * static_cast<double>(missing) / n;
    return metrics;
}

std::optional<BreakdownKey> breakdown_key_from_string(const std::string& s) {
    if (s == "dynamism") return BreakdownKey::dynamism;
    if (s == "domain") return BreakdownKey::domain;
    if (s == "question_type") return BreakdownKey::question_type;
    return std::nullopt;
}

namespace {

std::string group_label(const Query& query, BreakdownKey key) {
    switch (key) {
        case BreakdownKey::dynamism:
            return query.dynamism ? to_string(*query.dynamism) : "unknown";
        case BreakdownKey::domain:
            return query.domain ? to_string(*query.domain) : "unknown";
        case BreakdownKey::question_type:
            return query.question_type ? *query.question_type : "unknown";
    }
    return "unknown";
}

} // namespace

std::map<std::string, EvalMetrics> breakdown(const std::vector<Judgment>& judgments,
                                             const std::vector<Query>& queries,
                                             BreakdownKey key) {
    std::unordered_map<std::string, std::string> label_by_id;
    for (const auto& query : queries) {
        label_by_id[query.id] = group_label(query, key);
    }
    std::map<std::string, std::vector<Judgment>> grouped;
    for (const auto& judgment : judgments) {
        auto it = label_by_id.find(judgment.query_id);
        grouped[it != label_by_id.end() ? it->second : "unknown"].push_back(judgment);
    }
    std::map<std::string, EvalMetrics> out;
    for (const auto& [label, group] : grouped) {
        out[label] = aggregate(group);
    }
    return out;
}

MetricsDelta compare(const EvalMetrics& a, const EvalMetrics& b) {
    return MetricsDelta{a.accuracy_pct - b.accuracy_pct,
                        a.hallucination_pct - b.hallucination_pct,
                        a.missing_pct - b.missing_pct};
}

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt2_signed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.2f", v);
    return buf;
}

} // namespace

std::string render_comparison(const MetricsDelta& delta) {
    std::ostringstream out;
    out << "Delta (a - b), absolute percentage points\n"
        << "  Acc.:  " << fmt2_signed(delta.accuracy) << "\n"
        << "  Hall.: " << fmt2_signed(delta.hallucination) << "\n"
        << "  Miss.: " << fmt2_signed(delta.missing) << "\n";
    return out.str();
}

EvalReport evaluate(const std::vector<QueryTrace>& traces,
                    const std::vector<DatasetRecord>& records,
                    std::optional<BreakdownKey> key) {
    std::unordered_map<std::string, const Query*> query_by_id;
    for (const auto& record : records) {
        query_by_id[record.query.id] = &record.query;
    }

    EvalReport report;
    std::vector<Query> scored_queries;
    for (const auto& trace : traces) {
        auto it = query_by_id.find(trace.query_id);
        if (it == query_by_id.end() || !it->second->gold_answer ||
            it->second->gold_answer->empty()) {
            ++report.unscored;
            continue;
        }
        report.judgments.push_back(judge(trace, *it->second->gold_answer));
        scored_queries.push_back(*it->second);
    }
    if (report.judgments.empty()) {
        throw Error(ErrorCode::invalid_argument,
                    "no scorable queries (no trace matches a gold-labeled record)");
    }
    report.overall = aggregate(report.judgments);
    if (key) {
        report.groups = breakdown(report.judgments, scored_queries, *key);
    }
    return report;
}

namespace {

void table_row(std::ostringstream& out, const std::string& label, const EvalMetrics& m) {
    out << label;
    for (std::size_t i = label.size(); i < 16; ++i) out << ' ';
    out << fmt2(m.accuracy_pct) << "\t" << fmt2(m.hallucination_pct) << "\t"
        << fmt2(m.missing_pct) << "\t" << m.n << "\n";
}

} // namespace

std::string render_table(const EvalReport& report) {
    std::ostringstream out;
    out << "                Acc.(%)\tHall.(%)\tMiss.(%)\tN\n";
    table_row(out, "overall", report.overall);
    for (const auto& [label, metrics] : report.groups) {
        table_row(out, label, metrics);
    }
    if (report.unscored > 0) {
        out << "unscored (no gold answer): " << report.unscored << "\n";
    }
    return out.str();
}

std::string render_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "group,n,accuracy_pct,hallucination_pct,missing_pct\n";
    out << "overall," << report.overall.n << "," << fmt2(report.overall.accuracy_pct) << ","
        << fmt2(report.overall.hallucination_pct) << "," << fmt2(report.overall.missing_pct)
        << "\n";
    for (const auto& [label, m] : report.groups) {
        out << label << "," << m.n << "," << fmt2(m.accuracy_pct) << ","
            << fmt2(m.hallucination_pct) << "," << fmt2(m.missing_pct) << "\n";
    }
    return out.str();
}

} // namespace dynarag
