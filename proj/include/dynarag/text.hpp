#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

// Shared text utilities: tokenization, stop-word filtering, term overlap,
// and the normalization rules used for abstention detection and answer
// matching. Everything here is pure and deterministic.

namespace dynarag::text {

// Lowercased runs of ASCII alphanumerics; everything else is a separator.
std::vector<std::string> tokenize(std::string_view s);

bool is_stop_word(const std::string& token);

// tokenize() minus stop words, order preserved, duplicates kept.
std::vector<std::string> content_terms(std::string_view s);

// Distinct content terms of `s`.
std::unordered_set<std::string> content_term_set(std::string_view s);

// |terms(query) ∩ terms(doc)| / |terms(query)| over distinct content terms.
// A query with no content terms scores 0.
double term_overlap(const std::unordered_set<std::string>& query_terms,
                    std::string_view doc);

// Lowercase, map punctuation to spaces, collapse whitespace, trim.
// Used for containment matching of gold answers.
std::string normalize_for_match(std::string_view s);

// Lowercase, strip trailing punctuation, collapse whitespace, trim.
// Used for exact-match abstention detection; interior punctuation
// (e.g. the apostrophe in "don't") is preserved.
std::string normalize_answer(std::string_view s);

// Number of whitespace-delimited chunks; the prompt budget unit.
std::size_t word_count(std::string_view s);

std::string to_lower(std::string_view s);

// Longest run of consecutive capitalized words in the raw (un-lowercased)
// text, joined by single spaces; empty string when there is none.
// Ties go to the earliest run.
std::string longest_capitalized_span(std::string_view s);

// First token parseable as an integer / as a decimal number. Returns
// false when no such token exists.
bool first_integer(std::string_view s, long long& out);
bool first_number(std::string_view s, double& out);

} // namespace dynarag::text
