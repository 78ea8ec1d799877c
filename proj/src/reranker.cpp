#include "dynarag/reranker.hpp"

#include "dynarag/error.hpp"
#include "dynarag/http_client.hpp"
#include "dynarag/text.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace dynarag {

RelevanceScore::RelevanceScore(double v) : value(v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::invalid_argument,
                    "relevance score outside [0,1]: " + std::to_string(v));
    }
}

RelevanceScore LexicalScorer::score(const std::string& query_text,
                                    const std::string& snippet_text) const {
    auto query_terms = text::content_term_set(query_text);
    return RelevanceScore(text::term_overlap(query_terms, snippet_text));
}

RemoteScorer::RemoteScorer(std::string endpoint, std::string bearer_token, int timeout_ms)
    : endpoint_(std::move(endpoint)), bearer_token_(std::move(bearer_token)),
      timeout_ms_(timeout_ms) {
    if (endpoint_.empty()) {
        throw Error(ErrorCode::config_error, "remote scorer requires an endpoint");
    }
}

RelevanceScore RemoteScorer::score(const std::string& query_text,
                                   const std::string& snippet_text) const {
    nlohmann::json request = {{"query", query_text}, {"passage", snippet_text}};
    HttpResult response = post_json(endpoint_, request.dump(), timeout_ms_, bearer_token_);
    if (!response.ok()) {
        throw Error(ErrorCode::scorer_failure,
                    "remote scorer failed: " +
                        (response.transport_ok ? "HTTP " + std::to_string(response.status)
                                               : response.error));
    }
    nlohmann::json body = nlohmann::json::parse(response.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("score") ||
        !body["score"].is_number()) {
        throw Error(ErrorCode::scorer_failure,
                    "remote scorer returned an unparseable score: " + response.body);
    }
    double value = body["score"].get<double>();
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::scorer_failure, "remote scorer returned a non-finite score");
    }
    return RelevanceScore(std::clamp(value, 0.0, 1.0));
}

RelevanceScore score(const Query& query, const CleanedSnippet& snippet, const Scorer& scorer) {
    try {
        return scorer.score(query.text, snippet.text);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::scorer_failure) {
            throw Error(ErrorCode::scorer_failure,
                        "scoring snippet from " + snippet.source_url + ": " + e.what());
        }
        throw;
    }
}

std::vector<RankedPassage> rerank(const Query& query,
                                  const std::vector<CleanedSnippet>& snippets,
                                  const Scorer& scorer, int n) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "top-n must be >= 1");

    std::vector<RankedPassage> ranked;
    ranked.reserve(snippets.size());
    for (std::size_t i = 0; i < snippets.size(); ++i) {
        ranked.push_back(RankedPassage{snippets[i], score(query, snippets[i], scorer), i});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedPassage& a, const RankedPassage& b) {
        if (a.score.value != b.score.value) return a.score.value > b.score.value;
        return a.original_index < b.original_index;
    });
    if (ranked.size() > static_cast<std::size_t>(n)) {
        ranked.resize(static_cast<std::size_t>(n));
    }
    return ranked;
}

} // namespace dynarag
