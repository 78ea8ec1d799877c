#pragma once

#include "dynarag/api_router.hpp"
#include "dynarag/reranker.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dynarag {

// Verbatim system preamble every rendered prompt starts with.
inline constexpr std::string_view kSystemPreamble =
    "Answer in one or two short sentences. If you are not sure, respond with I don't know.";

inline constexpr std::string_view kAbstentionPhrase = "I don't know.";

struct GenerationContext {
    Query query;
    std::vector<RankedPassage> passages;      // rank order (best first)
    std::optional<ApiResponse> api_response;  // rendered only when status ok
    int token_budget = 4000;                  // whitespace-delimited words
};

struct AnswerRecord {
    std::string answer_text;
    bool abstained = false;
    bool used_api = false;
    std::vector<std::string> sources; // urls of the passages that fit the budget
};

class Generator {
public:
    virtual ~Generator() = default;
    // Throws Error(generator_failure) when no answer text can be produced.
    virtual std::string generate(const std::string& rendered_prompt) const = 0;
};

// Reference generator: extractive. Re-parses the fixed prompt layout,
// scores every context sentence by content-term overlap with the question
// and returns the best one, or the abstention phrase when the best overlap
// is below 0.2. Deterministic, so the full pipeline runs without a model.
class ExtractiveGenerator final : public Generator {
public:
    std::string generate(const std::string& rendered_prompt) const override;
};

// Remote generator: POST {"prompt": str, "temperature": 0, "top_p": 0.9}
// -> {"text": str}.
class RemoteGenerator final : public Generator {
public:
    RemoteGenerator(std::string endpoint, std::string bearer_token = "", int timeout_ms = 30000);
    std::string generate(const std::string& rendered_prompt) const override;

private:
    std::string endpoint_;
    std::string bearer_token_;
    int timeout_ms_;
};

struct RenderedPrompt {
    std::string prompt;
    std::vector<std::string> included_sources;
};

// Prompt layout, top to bottom: preamble, API response block (when the
// response is ok), passages in rank order, question. Passages are dropped
// from the lowest-ranked end until the whole prompt fits token_budget;
// if the fixed parts alone overflow, budget_exceeded is thrown.
RenderedPrompt render_prompt_detailed(const GenerationContext& ctx);
std::string render_prompt(const GenerationContext& ctx);

AnswerRecord generate_answer(const GenerationContext& ctx, const Generator& gen);

} // namespace dynarag
