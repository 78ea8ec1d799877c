#pragma once

#include "dynarag/dataset.hpp"
#include "dynarag/html_cleaner.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dynarag {

// Relevance grade in [0, 1]. Construction rejects NaN/out-of-range values;
// scorers clamp remote outputs before wrapping them.
struct RelevanceScore {
    RelevanceScore() = default;
    explicit RelevanceScore(double v);
    double value = 0.0;
};

struct RankedPassage {
    CleanedSnippet snippet;
    RelevanceScore score;
    std::size_t original_index = 0; // position in the pre-ranking snippet list
};

class Scorer {
public:
    virtual ~Scorer() = default;
    // Throws Error(scorer_failure) when a grade cannot be produced.
    virtual RelevanceScore score(const std::string& query_text,
                                 const std::string& snippet_text) const = 0;
};

// Reference scorer: normalized content-term overlap
// |terms(q) ∩ terms(d)| / |terms(q)| after lowercasing and stop-word
// removal. Deterministic; the oracle for every ranking test.
class LexicalScorer final : public Scorer {
public:
    RelevanceScore score(const std::string& query_text,
                         const std::string& snippet_text) const override;
};

// Remote scorer: POST {"query": str, "passage": str} -> {"score": number}.
// Scores outside [0,1] are clamped; transport or parse failures raise
// Error(scorer_failure).
class RemoteScorer final : public Scorer {
public:
    RemoteScorer(std::string endpoint, std::string bearer_token = "", int timeout_ms = 5000);
    RelevanceScore score(const std::string& query_text,
                         const std::string& snippet_text) const override;

private:
    std::string endpoint_;
    std::string bearer_token_;
    int timeout_ms_;
};

RelevanceScore score(const Query& query, const CleanedSnippet& snippet, const Scorer& scorer);

// Scores every snippet and returns the top-n, sorted by descending score
// with ties broken by ascending original index. Scorer failures propagate;
// a partial failure fails the whole query.
std::vector<RankedPassage> rerank(const Query& query,
                                  const std::vector<CleanedSnippet>& snippets,
                                  const Scorer& scorer, int n);

} // namespace dynarag
