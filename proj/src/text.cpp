#include "dynarag/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace dynarag::text {

namespace {

const std::unordered_set<std::string>& stop_words() {
    static const std::unordered_set<std::string> words = {
        "a",     "an",    "the",   "is",    "are",   "was",   "were",
        "be",    "been",  "being", "am",    "do",    "does",  "did",
        "have",  "has",   "had",   "of",    "in",    "on",    "at",
        "to",    "for",   "with",  "by",    "from",  "as",    "and",
        "or",    "but",   "not",   "no",    "it",    "its",   "this",
        "that",  "these", "those", "i",     "you",   "he",    "she",
        "we",    "they",  "them",  "his",   "her",   "their", "my",
        "your",  "our",   "me",    "us",    "what",  "which", "who",
        "whom",  "when",  "where", "why",   "how",   "can",   "could",
        "will",  "would", "shall", "should","may",   "might", "must",
        "if",    "then",  "than",  "so",    "such",  "there", "here",
        "about", "into",  "over",  "under", "again", "once",  "during",
        "before","after", "above", "below", "up",    "down",  "out",
        "off",   "all",   "any",   "both",  "each",  "few",   "more",
        "most",  "other", "some",  "only",  "own",   "same",  "very",
        "s",     "t",     "also",  "too",   "per",
    };
    return words;
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Strips surrounding (non-alnum) punctuation from a whitespace token.
std::string_view strip_punct(std::string_view token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && !is_alnum(token[b])) ++b;
    while (e > b && !is_alnum(token[e - 1])) --e;
    return token.substr(b, e - b);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

} // namespace

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : s) {
        if (is_alnum(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool is_stop_word(const std::string& token) {
    return stop_words().count(token) > 0;
}

std::vector<std::string> content_terms(std::string_view s) {
    std::vector<std::string> out;
    for (auto& tok : tokenize(s)) {
        if (!is_stop_word(tok)) out.push_back(std::move(tok));
    }
    return out;
}

std::unordered_set<std::string> content_term_set(std::string_view s) {
    auto terms = content_terms(s);
    return {terms.begin(), terms.end()};
}

double term_overlap(const std::unordered_set<std::string>& query_terms,
                    std::string_view doc) {
    if (query_terms.empty()) return 0.0;
    std::unordered_set<std::string> seen;
    for (auto& tok : tokenize(doc)) {
        if (query_terms.count(tok)) seen.insert(std::move(tok));
    }
    return static_cast<double>(seen.size()) / static_cast<double>(query_terms.size());
}

std::string normalize_for_match(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(uc)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::string normalize_answer(std::string_view s) {
    // Collapse whitespace and lowercase in one pass.
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            pending_space = true;
        } else {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    // Strip trailing punctuation only.
    while (!out.empty()) {
        unsigned char last = static_cast<unsigned char>(out.back());
        if (std::ispunct(last)) out.pop_back();
        else break;
    }
    while (!out.empty() && is_space(out.back())) out.pop_back();
    return out;
}

std::size_t word_count(std::string_view s) {
    return split_ws(s).size();
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string longest_capitalized_span(std::string_view s) {
    auto tokens = split_ws(s);
    std::vector<std::string_view> best, current;
    for (auto raw : tokens) {
        auto tok = strip_punct(raw);
        bool capitalized = !tok.empty() && std::isupper(static_cast<unsigned char>(tok[0]));
        if (capitalized) {
            current.push_back(tok);
        } else {
            if (current.size() > best.size()) best = current;
            current.clear();
        }
    }
    if (current.size() > best.size()) best = current;

    std::string out;
    for (std::size_t i = 0; i < best.size(); ++i) {
        if (i) out.push_back(' ');
        out.append(best[i]);
    }
    return out;
}

namespace {

bool looks_like_integer(std::string_view tok) {
    if (tok.empty()) return false;
    std::size_t i = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
    if (i >= tok.size()) return false;
    for (; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    }
    return true;
}

bool looks_like_number(std::string_view tok) {
    if (tok.empty()) return false;
    std::size_t i = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
    bool digits = false, dot = false;
    for (; i < tok.size(); ++i) {
        char c = tok[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            return false;
        }
    }
    return digits;
}

// Like strip_punct but keeps leading signs and interior dots/commas intact,
// so "142.75," and "(-3)" still yield parseable number tokens.
std::string_view strip_number_punct(std::string_view token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    auto keep = [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-';
    };
    while (b < e && !keep(token[b])) ++b;
    while (e > b && !std::isdigit(static_cast<unsigned char>(token[e - 1]))) --e;
    return token.substr(b, e - b);
}

} // namespace

bool first_integer(std::string_view s, long long& out) {
    for (auto raw : split_ws(s)) {
        auto tok = strip_number_punct(raw);
        if (looks_like_integer(tok)) {
            out = std::strtoll(std::string(tok).c_str(), nullptr, 10);
            return true;
        }
    }
    return false;
}

bool first_number(std::string_view s, double& out) {
    for (auto raw : split_ws(s)) {
        auto tok = strip_number_punct(raw);
        if (looks_like_number(tok)) {
            out = std::strtod(std::string(tok).c_str(), nullptr);
            return true;
        }
    }
    return false;
}

} // namespace dynarag::text
