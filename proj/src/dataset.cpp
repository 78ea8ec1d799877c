#include "dynarag/dataset.hpp"

#include "dynarag/error.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace dynarag {

using nlohmann::ordered_json;

const char* to_string(Domain d) {
    switch (d) {
        case Domain::finance: return "finance";
        case Domain::sports: return "sports";
        case Domain::music: return "music";
        case Domain::movie: return "movie";
        case Domain::open: return "open";
    }
    return "open";
}

const char* to_string(Dynamism d) {
    switch (d) {
        case Dynamism::real_time: return "real_time";
        case Dynamism::fast_changing: return "fast_changing";
        case Dynamism::slow_changing: return "slow_changing";
        case Dynamism::static_fact: return "static";
    }
    return "static";
}

std::optional<Domain> domain_from_string(const std::string& s) {
    if (s == "finance") return Domain::finance;
    if (s == "sports") return Domain::sports;
    if (s == "music") return Domain::music;
    if (s == "movie") return Domain::movie;
    if (s == "open") return Domain::open;
    return std::nullopt;
}

std::optional<Dynamism> dynamism_from_string(const std::string& s) {
    if (s == "real_time") return Dynamism::real_time;
    if (s == "fast_changing") return Dynamism::fast_changing;
    if (s == "slow_changing") return Dynamism::slow_changing;
    if (s == "static") return Dynamism::static_fact;
    return std::nullopt;
}

namespace {

[[noreturn]] void malformed(std::size_t line_number, const std::string& why) {
    std::string where = line_number ? "line " + std::to_string(line_number) + ": " : "";
    throw Error(ErrorCode::parse_error, where + why);
}

std::string require_string(const ordered_json& j, const char* key, std::size_t line) {
    if (!j.contains(key) || !j[key].is_string()) {
        malformed(line, std::string("missing or non-string field \"") + key + "\"");
    }
    return j[key].get<std::string>();
}

} // namespace

DatasetRecord parse_record(const std::string& json_line, std::size_t line_number) {
    ordered_json j = ordered_json::parse(json_line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        malformed(line_number, "not a JSON object");
    }

    DatasetRecord record;
    record.query.id = require_string(j, "id", line_number);
    record.query.text = require_string(j, "query", line_number);
    if (record.query.id.empty()) malformed(line_number, "empty query id");
    if (record.query.text.empty()) malformed(line_number, "empty query text");

    if (j.contains("gold_answer") && !j["gold_answer"].is_null()) {
        if (!j["gold_answer"].is_string()) malformed(line_number, "gold_answer must be a string");
        record.query.gold_answer = j["gold_answer"].get<std::string>();
    }
    if (j.contains("domain") && !j["domain"].is_null()) {
        if (!j["domain"].is_string()) malformed(line_number, "domain must be a string");
        auto d = domain_from_string(j["domain"].get<std::string>());
        if (!d) malformed(line_number, "unknown domain \"" + j["domain"].get<std::string>() + "\"");
        record.query.domain = d;
    }
    if (j.contains("dynamism") && !j["dynamism"].is_null()) {
        if (!j["dynamism"].is_string()) malformed(line_number, "dynamism must be a string");
        auto d = dynamism_from_string(j["dynamism"].get<std::string>());
        if (!d) malformed(line_number, "unknown dynamism \"" + j["dynamism"].get<std::string>() + "\"");
        record.query.dynamism = d;
    }
    if (j.contains("question_type") && !j["question_type"].is_null()) {
        if (!j["question_type"].is_string()) malformed(line_number, "question_type must be a string");
        record.query.question_type = j["question_type"].get<std::string>();
    }

    if (j.contains("search_results") && !j["search_results"].is_null()) {
        if (!j["search_results"].is_array()) malformed(line_number, "search_results must be an array");
        std::unordered_set<int> seen_ranks;
        for (const auto& sr : j["search_results"]) {
            if (!sr.is_object()) malformed(line_number, "search_results entry is not an object");
            RawDocument doc;
            doc.url = require_string(sr, "url", line_number);
            doc.html = require_string(sr, "html", line_number);
            if (!sr.contains("rank") || !sr["rank"].is_number_integer()) {
                malformed(line_number, "missing or non-integer rank");
            }
            doc.rank = sr["rank"].get<int>();
            if (doc.rank < 1) malformed(line_number, "rank must be >= 1");
            if (!seen_ranks.insert(doc.rank).second) {
                std::string where = line_number ? "line " + std::to_string(line_number) + ": " : "";
                throw Error(ErrorCode::rank_collision,
                            where + "duplicate rank " + std::to_string(doc.rank) +
                                " in record \"" + record.query.id + "\"");
            }
            record.documents.push_back(std::move(doc));
        }
    }
    return record;
}

std::vector<DatasetRecord> load_dataset(const std::string& path, int k_max) {
    if (k_max < 1) throw Error(ErrorCode::invalid_argument, "k_max must be >= 1");

    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open dataset file: " + path);

    std::vector<DatasetRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        DatasetRecord record = parse_record(line, line_number);
        if (!seen_ids.insert(record.query.id).second) {
            throw Error(ErrorCode::duplicate_id,
                        "line " + std::to_string(line_number) + ": duplicate query id \"" +
                            record.query.id + "\"");
        }
        // Keep the k_max best-ranked documents; original document order is
        // otherwise preserved for documents of equal standing.
        if (static_cast<int>(record.documents.size()) > k_max) {
            std::sort(record.documents.begin(), record.documents.end(),
                      [](const RawDocument& a, const RawDocument& b) { return a.rank < b.rank; });
            record.documents.resize(static_cast<std::size_t>(k_max));
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::string serialize_record(const DatasetRecord& record) {
    ordered_json j;
    j["id"] = record.query.id;
    j["query"] = record.query.text;
    if (record.query.gold_answer) j["gold_answer"] = *record.query.gold_answer;
    if (record.query.domain) j["domain"] = to_string(*record.query.domain);
    if (record.query.dynamism) j["dynamism"] = to_string(*record.query.dynamism);
    if (record.query.question_type) j["question_type"] = *record.query.question_type;
    j["search_results"] = ordered_json::array();
    for (const auto& doc : record.documents) {
        j["search_results"].push_back({{"url", doc.url}, {"rank", doc.rank}, {"html", doc.html}});
    }
    return j.dump();
}

void save_dataset(const std::vector<DatasetRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write dataset file: " + path);
    for (const auto& record : records) {
        out << serialize_record(record) << "\n";
    }
}

std::vector<RawDocument> retrieval_set(const DatasetRecord& record) {
    std::vector<RawDocument> docs = record.documents;
    std::sort(docs.begin(), docs.end(),
              [](const RawDocument& a, const RawDocument& b) { return a.rank < b.rank; });
    return docs;
}

} // namespace dynarag
