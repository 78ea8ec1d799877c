#pragma once

#include "dynarag/dataset.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dynarag {

enum class ParamType { string_type, integer_type, number_type, boolean_type };

const char* to_string(ParamType t);

struct ApiParameter {
    std::string name;
    ParamType type = ParamType::string_type;
    bool required = false;
    std::string description;
};

struct ApiSchema {
    std::string name;        // unique within a catalog
    std::string description;
    std::vector<ApiParameter> parameters; // names unique within a schema
    std::string endpoint;    // URL the call is POSTed to

    std::string embedding_text() const { return name + ": " + description; }
};

// Catalog file: JSON array of ApiSchema objects.
std::vector<ApiSchema> load_catalog(const std::string& path);
std::vector<ApiSchema> parse_catalog(const std::string& json_text);
std::string serialize_catalog(const std::vector<ApiSchema>& catalog);

struct EmbeddingVector {
    std::vector<double> values;
    std::size_t dimension() const { return values.size(); }
};

// Canonical cosine similarity; zero vectors compare as 0 to everything.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
public:
    virtual ~Embedder() = default;
    // Throws Error(embedder_failure) when no vector can be produced.
    virtual EmbeddingVector embed(const std::string& text) const = 0;
};

// Reference embedder: tokens hashed into a fixed-dimension bag-of-words
// histogram (FNV-1a buckets), L2-normalized. Deterministic, no model.
class HashedBowEmbedder final : public Embedder {
public:
    explicit HashedBowEmbedder(std::size_t dimension = 256);
    EmbeddingVector embed(const std::string& text) const override;

private:
    std::size_t dimension_;
};

// Remote embedder: POST {"text": str} -> {"embedding": [number, ...]}.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(std::string endpoint, std::string bearer_token = "", int timeout_ms = 5000);
    EmbeddingVector embed(const std::string& text) const override;

private:
    std::string endpoint_;
    std::string bearer_token_;
    int timeout_ms_;
};

// Flat exact index: search is a full cosine scan, so results are exact by
// construction. Immutable after build.
class SchemaIndex {
public:
    SchemaIndex() = default;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    struct Entry {
        ApiSchema schema;
        EmbeddingVector vector;
    };
    const std::vector<Entry>& entries() const { return entries_; }

    struct Hit {
        ApiSchema schema;
        double similarity = 0.0;
    };

    // The min(m, size) most similar schemas, descending similarity, ties
    // broken by lexicographic schema name.
    std::vector<Hit> top_m_hits(const Query& query, int m, const Embedder& embedder) const;
    std::vector<ApiSchema> top_m(const Query& query, int m, const Embedder& embedder) const;

    friend SchemaIndex build_index(const std::vector<ApiSchema>& schemas,
                                   const Embedder& embedder);

private:
    std::vector<Entry> entries_;
};

// Embeds each schema's "name: description" text. Duplicate names and
// embedder failures raise errors naming the offending schema.
SchemaIndex build_index(const std::vector<ApiSchema>& schemas, const Embedder& embedder);

} // namespace dynarag
