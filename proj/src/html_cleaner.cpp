#include "dynarag/html_cleaner.hpp"

#include <array>
#include <cctype>
#include <map>

namespace dynarag {

namespace {

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool is_ws(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Elements whose entire subtree is boilerplate.
constexpr std::array<std::string_view, 5> kRemovedContainers = {
    "nav", "header", "footer", "aside", "noscript"};

bool is_removed_container(std::string_view name) {
    for (auto candidate : kRemovedContainers) {
        if (name == candidate) return true;
    }
    return false;
}

bool ci_matches_at(std::string_view html, std::size_t pos, std::string_view needle) {
    if (pos + needle.size() > html.size()) return false;
    for (std::size_t i = 0; i < needle.size(); ++i) {
        if (lower(html[pos + i]) != needle[i]) return false;
    }
    return true;
}

std::size_t find_ci(std::string_view html, std::size_t from, std::string_view needle) {
    if (html.size() < needle.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= html.size(); ++i) {
        if (ci_matches_at(html, i, needle)) return i;
    }
    return std::string_view::npos;
}

struct Tag {
    std::string name;       // lowercased
    bool closing = false;
    bool self_closing = false;
    std::size_t end = 0;    // index just past '>' (or end of input)
};

// Parses the tag starting at html[pos] == '<'. Attribute values in quotes
// may contain '>' without ending the tag. Unterminated tags swallow the
// rest of the input.
Tag parse_tag(std::string_view html, std::size_t pos) {
    Tag tag;
    std::size_t i = pos + 1;
    if (i < html.size() && html[i] == '/') {
        tag.closing = true;
        ++i;
    }
    while (i < html.size() && std::isalnum(static_cast<unsigned char>(html[i]))) {
        tag.name.push_back(lower(html[i]));
        ++i;
    }
    char last_meaningful = '\0';
    while (i < html.size() && html[i] != '>') {
        char c = html[i];
        if (c == '"' || c == '\'') {
            ++i;
            while (i < html.size() && html[i] != c) ++i;
            if (i < html.size()) ++i;
            last_meaningful = '"';
            continue;
        }
        if (!is_ws(c)) last_meaningful = c;
        ++i;
    }
    tag.self_closing = (last_meaningful == '/');
    tag.end = (i < html.size()) ? i + 1 : html.size();
    return tag;
}

// Decodes the entity at html[pos] == '&' when it is one of the few we
// handle; returns true and advances pos past it. Entities that could
// reintroduce markup characters (&lt; &gt;) or re-form further entities
// (&amp;) pass through untouched, which keeps cleaning idempotent.
bool decode_entity(std::string_view html, std::size_t& pos, std::string& out) {
    struct Entity {
        std::string_view name;
        char replacement;
    };
    static constexpr std::array<Entity, 6> kEntities = {{
        {"&nbsp;", ' '},
        {"&#160;", ' '},
        {"&quot;", '"'},
        {"&#34;", '"'},
        {"&apos;", '\''},
        {"&#39;", '\''},
    }};
    for (const auto& e : kEntities) {
        if (ci_matches_at(html, pos, e.name)) {
            out.push_back(e.replacement);
            pos += e.name.size();
            return true;
        }
    }
    return false;
}

// Space/tab runs become one space; any whitespace run containing a newline
// becomes one newline; result is trimmed.
std::string normalize_whitespace(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        if (is_ws(raw[i])) {
            bool saw_newline = false;
            while (i < raw.size() && is_ws(raw[i])) {
                if (raw[i] == '\n' || raw[i] == '\r') saw_newline = true;
                ++i;
            }
            if (!out.empty()) out.push_back(saw_newline ? '\n' : ' ');
        } else {
            out.push_back(raw[i]);
            ++i;
        }
    }
    while (!out.empty() && is_ws(out.back())) out.pop_back();
    return out;
}

} // namespace

std::string extract_paragraph_text(std::string_view html) {
    std::vector<std::string> paragraphs;
    std::string current;
    bool in_paragraph = false;
    std::map<std::string, int> removed_depth;
    int removal = 0;

    auto flush_paragraph = [&] {
        if (in_paragraph) {
            std::string text = normalize_whitespace(current);
            if (!text.empty()) paragraphs.push_back(std::move(text));
        }
        current.clear();
        in_paragraph = false;
    };

    std::size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c != '<') {
            if (removal == 0 && in_paragraph && c != '>') { // stray '>' is dropped
                if (c == '&' && decode_entity(html, i, current)) continue;
                current.push_back(c);
            }
            ++i;
            continue;
        }

        // Comments, doctype, processing instructions.
        if (ci_matches_at(html, i, "<!--")) {
            std::size_t close = find_ci(html, i + 4, "-->");
            i = (close == std::string_view::npos) ? html.size() : close + 3;
            continue;
        }
        if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
            std::size_t close = html.find('>', i);
            i = (close == std::string_view::npos) ? html.size() : close + 1;
            continue;
        }
        // A '<' that does not start a tag is dropped rather than emitted,
        // so the no-tag-delimiter invariant holds even on broken markup.
        if (i + 1 >= html.size() ||
            (html[i + 1] != '/' && !std::isalpha(static_cast<unsigned char>(html[i + 1])))) {
            ++i;
            continue;
        }

        Tag tag = parse_tag(html, i);
        i = tag.end;
        if (tag.name.empty()) continue;

        // script/style hold raw text: skip straight to their close tag.
        if (!tag.closing && !tag.self_closing && (tag.name == "script" || tag.name == "style")) {
            if (in_paragraph && removal == 0) current.push_back(' ');
            std::string close = "</" + tag.name;
            std::size_t pos = find_ci(html, i, close);
            if (pos == std::string_view::npos) {
                i = html.size();
            } else {
                std::size_t gt = html.find('>', pos);
                i = (gt == std::string_view::npos) ? html.size() : gt + 1;
            }
            continue;
        }

        if (is_removed_container(tag.name)) {
            if (in_paragraph && removal == 0) current.push_back(' ');
            if (tag.self_closing) continue;
            if (tag.closing) {
                int& depth = removed_depth[tag.name];
                if (depth > 0) {
                    --depth;
                    --removal;
                }
            } else {
                ++removed_depth[tag.name];
                ++removal;
            }
            continue;
        }

        if (tag.name == "p" && removal == 0) {
            if (tag.closing) {
                flush_paragraph();
            } else {
                flush_paragraph(); // <p> implicitly closes an open paragraph
                in_paragraph = true;
                if (tag.self_closing) flush_paragraph();
            }
        }
        // Other tags inside a paragraph (<b>, <a href=..>, <br/>) act as
        // soft separators so "a<br>b" does not fuse into one word.
        else if (in_paragraph && removal == 0 && !tag.name.empty()) {
            current.push_back(' ');
        }
    }
    flush_paragraph();

    std::string out;
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
        if (p) out.push_back('\n');
        out.append(paragraphs[p]);
    }
    return out;
}

CleanedSnippet clean(const RawDocument& doc) {
    return CleanedSnippet{doc.url, extract_paragraph_text(doc.html), doc.rank};
}

std::vector<CleanedSnippet> clean_all(const std::vector<RawDocument>& docs) {
    std::vector<CleanedSnippet> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
        CleanedSnippet snippet = clean(doc);
        if (!snippet.text.empty()) out.push_back(std::move(snippet));
    }
    return out;
}

} // namespace dynarag
