#pragma once

#include "dynarag/dataset.hpp"

#include <string>
#include <vector>

namespace dynarag {

struct CleanedSnippet {
    std::string source_url;
    std::string text;       // never contains '<' or '>'
    int source_rank = 1;
};

// Lenient HTML-to-text extraction:
//   - content of script/style/nav/header/footer/aside/noscript is dropped
//   - only text inside <p> elements is kept, paragraphs joined by "\n"
//   - whitespace is normalized (space/tab runs -> one space, newline runs
//     -> one newline, result trimmed)
// Malformed markup never fails; unparseable input yields empty text.
// Entity handling is deliberately minimal: &nbsp;/&quot;/&apos; and their
// numeric forms are decoded, everything else (including &lt;/&gt;/&amp;)
// passes through verbatim so cleaning its own output is a no-op.
std::string extract_paragraph_text(std::string_view html);

CleanedSnippet clean(const RawDocument& doc);

// Element-wise clean in input order; snippets with empty text are dropped.
std::vector<CleanedSnippet> clean_all(const std::vector<RawDocument>& docs);

} // namespace dynarag
