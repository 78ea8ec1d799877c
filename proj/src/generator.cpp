#include "dynarag/generator.hpp"

#include "dynarag/error.hpp"
#include "dynarag/http_client.hpp"
#include "dynarag/text.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace dynarag {

namespace {

std::string single_line(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

} // namespace

RenderedPrompt render_prompt_detailed(const GenerationContext& ctx) {
    if (ctx.token_budget < 1) {
        throw Error(ErrorCode::invalid_argument, "token budget must be positive");
    }

    const bool has_api = ctx.api_response && ctx.api_response->status == ApiStatus::ok;
    const std::string question_line = "Question: " + single_line(ctx.query.text);

    std::size_t fixed = text::word_count(kSystemPreamble) + text::word_count(question_line);
    if (has_api) {
        fixed += text::word_count("API response:") + text::word_count(ctx.api_response->body);
    }
    if (fixed > static_cast<std::size_t>(ctx.token_budget)) {
        throw Error(ErrorCode::budget_exceeded,
                    "query and fixed context exceed the token budget (" +
                        std::to_string(fixed) + " > " + std::to_string(ctx.token_budget) + ")");
    }

    // Passages are admitted best-first until one no longer fits; everything
    // after it is dropped so the kept set is always a rank prefix.
    std::size_t used = fixed;
    std::vector<std::string> lines;
    std::vector<std::string> sources;
    for (std::size_t i = 0; i < ctx.passages.size(); ++i) {
        std::string line = "[" + std::to_string(i + 1) + "] " +
                           single_line(ctx.passages[i].snippet.text);
        std::size_t cost = text::word_count(line) + (lines.empty() ? 1 : 0); // +1: "Context:"
        if (used + cost > static_cast<std::size_t>(ctx.token_budget)) break;
        used += cost;
        lines.push_back(std::move(line));
        sources.push_back(ctx.passages[i].snippet.source_url);
    }

    std::ostringstream prompt;
    prompt << kSystemPreamble << "\n";
    if (has_api) {
        prompt << "\nAPI response:\n" << ctx.api_response->body << "\n";
    }
    if (!lines.empty()) {
        prompt << "\nContext:\n";
        for (const auto& line : lines) prompt << line << "\n";
    }
    prompt << "\n" << question_line;
    return RenderedPrompt{prompt.str(), std::move(sources)};
}

std::string render_prompt(const GenerationContext& ctx) {
    return render_prompt_detailed(ctx).prompt;
}

namespace {

// Splits a context line into sentences; terminators stay attached. A
// terminator only ends a sentence at end-of-line or before whitespace so
// decimals like 142.75 stay intact.
std::vector<std::string> split_sentences(const std::string& line) {
    std::vector<std::string> out;
    std::string current;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        current.push_back(c);
        bool terminator = c == '.' || c == '!' || c == '?';
        bool boundary = i + 1 == line.size() ||
                        std::isspace(static_cast<unsigned char>(line[i + 1]));
        if (terminator && boundary) {
            out.push_back(current);
            current.clear();
        }
    }
    out.push_back(current);

    std::vector<std::string> trimmed;
    for (auto& s : out) {
        std::size_t b = s.find_first_not_of(" \t");
        std::size_t e = s.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        trimmed.push_back(s.substr(b, e - b + 1));
    }
    return trimmed;
}

} // namespace

std::string ExtractiveGenerator::generate(const std::string& rendered_prompt) const {
    std::vector<std::string> lines;
    {
        std::istringstream in(rendered_prompt);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }

    std::string question;
    std::vector<std::string> candidates;
    enum class Section { none, api, context } section = Section::none;
    for (const auto& line : lines) {
        if (line.rfind("Question: ", 0) == 0) {
            question = line.substr(10);
            section = Section::none;
        } else if (line == "API response:") {
            section = Section::api;
        } else if (line == "Context:") {
            section = Section::context;
        } else if (line.empty()) {
            if (section == Section::api) section = Section::none;
        } else if (section == Section::api) {
            candidates.push_back(line);
        } else if (section == Section::context) {
            std::size_t close = line.find("] ");
            candidates.push_back((!line.empty() && line[0] == '[' && close != std::string::npos)
                                     ? line.substr(close + 2)
                                     : line);
        }
    }

    auto question_terms = text::content_term_set(question);
    std::string best_sentence;
    double best_overlap = -1.0;
    for (const auto& candidate : candidates) {
        for (const auto& sentence : split_sentences(candidate)) {
            double overlap = text::term_overlap(question_terms, sentence);
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best_sentence = sentence;
            }
        }
    }
    if (best_overlap < 0.2) return std::string(kAbstentionPhrase);
    return best_sentence;
}

RemoteGenerator::RemoteGenerator(std::string endpoint, std::string bearer_token, int timeout_ms)
    : endpoint_(std::move(endpoint)), bearer_token_(std::move(bearer_token)),
      timeout_ms_(timeout_ms) {
    if (endpoint_.empty()) {
        throw Error(ErrorCode::config_error, "remote generator requires an endpoint");
    }
}

std::string RemoteGenerator::generate(const std::string& rendered_prompt) const {
    nlohmann::json request = {
        {"prompt", rendered_prompt},
        {"temperature", 0},
        {"top_p", 0.9},
    };
    HttpResult response = post_json(endpoint_, request.dump(), timeout_ms_, bearer_token_);
    if (!response.ok()) {
        throw Error(ErrorCode::generator_failure,
                    "remote generator failed: " +
                        (response.transport_ok ? "HTTP " + std::to_string(response.status)
                                               : response.error));
    }
    nlohmann::json body = nlohmann::json::parse(response.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("text") ||
        !body["text"].is_string()) {
        throw Error(ErrorCode::generator_failure,
                    "remote generator returned unparseable output: " + response.body);
    }
    return body["text"].get<std::string>();
}

AnswerRecord generate_answer(const GenerationContext& ctx, const Generator& gen) {
    RenderedPrompt rendered = render_prompt_detailed(ctx);

    AnswerRecord record;
    try {
        record.answer_text = gen.generate(rendered.prompt);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::generator_failure) throw;
        throw Error(ErrorCode::generator_failure, e.what());
    }
    record.abstained =
        text::normalize_answer(record.answer_text) ==
        text::normalize_answer(kAbstentionPhrase);
    record.used_api = ctx.api_response && ctx.api_response->status == ApiStatus::ok;
    record.sources = std::move(rendered.included_sources);
    return record;
}

} // namespace dynarag
