#include "dynarag/schema_index.hpp"

#include "dynarag/error.hpp"
#include "dynarag/http_client.hpp"
#include "dynarag/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace dynarag {

using nlohmann::ordered_json;

const char* to_string(ParamType t) {
    switch (t) {
        case ParamType::string_type: return "string";
        case ParamType::integer_type: return "integer";
        case ParamType::number_type: return "number";
        case ParamType::boolean_type: return "boolean";
    }
    return "string";
}

namespace {

ParamType param_type_from_string(const std::string& s) {
    if (s == "string") return ParamType::string_type;
    if (s == "integer") return ParamType::integer_type;
    if (s == "number") return ParamType::number_type;
    if (s == "boolean") return ParamType::boolean_type;
    throw Error(ErrorCode::parse_error, "unknown parameter type \"" + s + "\"");
}

} // namespace

std::vector<ApiSchema> parse_catalog(const std::string& json_text) {
    ordered_json j = ordered_json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw Error(ErrorCode::parse_error, "catalog must be a JSON array of schemas");
    }

    std::vector<ApiSchema> catalog;
    std::unordered_set<std::string> names;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
            !item.contains("description") || !item["description"].is_string() ||
            !item.contains("endpoint") || !item["endpoint"].is_string()) {
            throw Error(ErrorCode::parse_error, "schema entry missing name/description/endpoint");
        }
        ApiSchema schema;
        schema.name = item["name"].get<std::string>();
        schema.description = item["description"].get<std::string>();
        schema.endpoint = item["endpoint"].get<std::string>();
        if (!names.insert(schema.name).second) {
            throw Error(ErrorCode::duplicate_id, "duplicate schema name \"" + schema.name + "\"");
        }
        if (item.contains("parameters")) {
            if (!item["parameters"].is_array()) {
                throw Error(ErrorCode::parse_error,
                            "schema \"" + schema.name + "\": parameters must be an array");
            }
            std::unordered_set<std::string> param_names;
            for (const auto& p : item["parameters"]) {
                if (!p.is_object() || !p.contains("name") || !p["name"].is_string() ||
                    !p.contains("type") || !p["type"].is_string()) {
                    throw Error(ErrorCode::parse_error,
                                "schema \"" + schema.name + "\": malformed parameter");
                }
                ApiParameter param;
                param.name = p["name"].get<std::string>();
                param.type = param_type_from_string(p["type"].get<std::string>());
                param.required = p.contains("required") && p["required"].is_boolean()
                                     ? p["required"].get<bool>()
                                     : false;
                if (p.contains("description") && p["description"].is_string()) {
                    param.description = p["description"].get<std::string>();
                }
                if (!param_names.insert(param.name).second) {
                    throw Error(ErrorCode::duplicate_id,
                                "schema \"" + schema.name + "\": duplicate parameter \"" +
                                    param.name + "\"");
                }
                schema.parameters.push_back(std::move(param));
            }
        }
        catalog.push_back(std::move(schema));
    }
    return catalog;
}

std::vector<ApiSchema> load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open catalog file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_catalog(buffer.str());
}

std::string serialize_catalog(const std::vector<ApiSchema>& catalog) {
    ordered_json j = ordered_json::array();
    for (const auto& schema : catalog) {
        ordered_json params = ordered_json::array();
        for (const auto& p : schema.parameters) {
            params.push_back({{"name", p.name},
                              {"type", to_string(p.type)},
                              {"required", p.required},
                              {"description", p.description}});
        }
        j.push_back({{"name", schema.name},
                     {"description", schema.description},
                     {"parameters", params},
                     {"endpoint", schema.endpoint}});
    }
    return j.dump(2);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw Error(ErrorCode::invalid_argument, "embedding dimensions differ");
    }
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        norm_a += a.values[i] * a.values[i];
        norm_b += b.values[i] * b.values[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

HashedBowEmbedder::HashedBowEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) {
        throw Error(ErrorCode::invalid_argument, "embedding dimension must be positive");
    }
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

} // namespace

EmbeddingVector HashedBowEmbedder::embed(const std::string& txt) const {
    EmbeddingVector v;
    v.values.assign(dimension_, 0.0);
    for (const auto& token : text::content_terms(txt)) {
        v.values[fnv1a(token) % dimension_] += 1.0;
    }
    double norm = 0.0;
    for (double x : v.values) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v.values) x /= norm;
    }
    return v;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::string bearer_token, int timeout_ms)
    : endpoint_(std::move(endpoint)), bearer_token_(std::move(bearer_token)),
      timeout_ms_(timeout_ms) {
    if (endpoint_.empty()) {
        throw Error(ErrorCode::config_error, "remote embedder requires an endpoint");
    }
}

EmbeddingVector RemoteEmbedder::embed(const std::string& txt) const {
    nlohmann::json request = {{"text", txt}};
    HttpResult response = post_json(endpoint_, request.dump(), timeout_ms_, bearer_token_);
    if (!response.ok()) {
        throw Error(ErrorCode::embedder_failure,
                    "remote embedder failed: " +
                        (response.transport_ok ? "HTTP " + std::to_string(response.status)
                                               : response.error));
    }
    nlohmann::json body = nlohmann::json::parse(response.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("embedding") ||
        !body["embedding"].is_array()) {
        throw Error(ErrorCode::embedder_failure,
                    "remote embedder returned an unparseable vector");
    }
    EmbeddingVector v;
    for (const auto& x : body["embedding"]) {
        if (!x.is_number()) {
            throw Error(ErrorCode::embedder_failure, "embedding contains a non-number");
        }
        double value = x.get<double>();
        if (!std::isfinite(value)) {
            throw Error(ErrorCode::embedder_failure, "embedding contains a non-finite value");
        }
        v.values.push_back(value);
    }
    if (v.values.empty()) {
        throw Error(ErrorCode::embedder_failure, "remote embedder returned an empty vector");
    }
    return v;
}

SchemaIndex build_index(const std::vector<ApiSchema>& schemas, const Embedder& embedder) {
    SchemaIndex index;
    std::unordered_set<std::string> names;
    std::size_t dimension = 0;
    for (const auto& schema : schemas) {
        if (!names.insert(schema.name).second) {
            throw Error(ErrorCode::duplicate_id, "duplicate schema name \"" + schema.name + "\"");
        }
        EmbeddingVector vector;
        try {
            vector = embedder.embed(schema.embedding_text());
        } catch (const Error& e) {
            throw Error(ErrorCode::embedder_failure,
                        "embedding schema \"" + schema.name + "\": " + e.what());
        }
        if (dimension == 0) {
            dimension = vector.dimension();
        } else if (vector.dimension() != dimension) {
            throw Error(ErrorCode::embedder_failure,
                        "schema \"" + schema.name + "\": embedding dimension " +
                            std::to_string(vector.dimension()) + " != " +
                            std::to_string(dimension));
        }
        index.entries_.push_back(SchemaIndex::Entry{schema, std::move(vector)});
    }
    return index;
}

std::vector<SchemaIndex::Hit> SchemaIndex::top_m_hits(const Query& query, int m,
                                                      const Embedder& embedder) const {
    if (m < 1) throw Error(ErrorCode::invalid_argument, "top-m must be >= 1");
    if (entries_.empty()) return {};

    EmbeddingVector query_vector = embedder.embed(query.text);
    std::vector<Hit> hits;
    hits.reserve(entries_.size());
    for (const auto& entry : entries_) {
        hits.push_back(Hit{entry.schema, cosine_similarity(query_vector, entry.vector)});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.schema.name < b.schema.name;
    });
    if (hits.size() > static_cast<std::size_t>(m)) {
        hits.resize(static_cast<std::size_t>(m));
    }
    return hits;
}

std::vector<ApiSchema> SchemaIndex::top_m(const Query& query, int m,
                                          const Embedder& embedder) const {
    std::vector<ApiSchema> out;
    for (auto& hit : top_m_hits(query, m, embedder)) {
        out.push_back(std::move(hit.schema));
    }
    return out;
}

} // namespace dynarag
