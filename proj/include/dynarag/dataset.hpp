#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dynarag {

enum class Domain { finance, sports, music, movie, open };
enum class Dynamism { real_time, fast_changing, slow_changing, static_fact };

const char* to_string(Domain d);
const char* to_string(Dynamism d);
std::optional<Domain> domain_from_string(const std::string& s);
std::optional<Dynamism> dynamism_from_string(const std::string& s);

struct Query {
    std::string id;
    std::string text;
    std::optional<std::string> gold_answer;
    std::optional<Domain> domain;
    std::optional<Dynamism> dynamism;
    std::optional<std::string> question_type;
};

struct RawDocument {
    std::string url;
    std::string html;
    int rank = 1; // search-result position, >= 1, unique per query
};

struct DatasetRecord {
    Query query;
    std::vector<RawDocument> documents;
};

// Loads a UTF-8 JSONL dataset, one record per line:
//   {"id": str, "query": str, "gold_answer": str?, "domain": str?,
//    "dynamism": str?, "question_type": str?,
//    "search_results": [{"url": str, "rank": int, "html": str}]}
// Each record keeps at most k_max documents, truncated by ascending rank;
// record order follows file order. Malformed lines raise parse_error with
// the line number, duplicate query ids raise duplicate_id, and repeated
// ranks within one record raise rank_collision.
std::vector<DatasetRecord> load_dataset(const std::string& path, int k_max);

// Single-record variants used by the JSON boundary. line_number only
// decorates error messages.
DatasetRecord parse_record(const std::string& json_line, std::size_t line_number = 0);
std::string serialize_record(const DatasetRecord& record);
void save_dataset(const std::vector<DatasetRecord>& records, const std::string& path);

// Documents of a record sorted by ascending rank.
std::vector<RawDocument> retrieval_set(const DatasetRecord& record);

} // namespace dynarag
