#pragma once

#include "dynarag/dataset.hpp"
#include "dynarag/schema_index.hpp"

#include <string>
#include <vector>

#include <json.hpp>

namespace dynarag {

struct ApiCall {
    std::string schema_name;
    // Parameter name -> JSON value; value types are checked by validate().
    nlohmann::ordered_json arguments = nlohmann::ordered_json::object();
};

enum class ApiStatus { ok, error };

struct ApiResponse {
    ApiStatus status = ApiStatus::error;
    std::string body;          // response body on ok, diagnostic on error
    long long latency_ms = 0;
};

class ToolCaller {
public:
    virtual ~ToolCaller() = default;
    // Proposes a call naming one of the candidates. Throws
    // Error(caller_failure) when no call can be produced; the proposal is
    // not yet validated against the catalog.
    virtual ApiCall propose_call(const std::string& query_text,
                                 const std::vector<ApiSchema>& candidates) const = 0;
};

// Reference caller, a deterministic test double rather than a quality
// baseline: picks the candidate whose name+description shares the most
// content terms with the query (ties keep candidate order), fills required
// string parameters with the query's longest capitalized span, integer and
// number parameters with the query's first number, and rejects when a
// required parameter cannot be filled.
class KeywordToolCaller final : public ToolCaller {
public:
    ApiCall propose_call(const std::string& query_text,
                         const std::vector<ApiSchema>& candidates) const override;
};

// Remote caller: POST {"query": str, "candidates": [schema...]} ->
// {"schema_name": str, "arguments": {...}}. Prose or any unparseable
// answer raises Error(caller_failure).
class RemoteToolCaller final : public ToolCaller {
public:
    RemoteToolCaller(std::string endpoint, std::string bearer_token = "", int timeout_ms = 5000);
    ApiCall propose_call(const std::string& query_text,
                         const std::vector<ApiSchema>& candidates) const override;

private:
    std::string endpoint_;
    std::string bearer_token_;
    int timeout_ms_;
};

ApiCall propose_call(const Query& query, const std::vector<ApiSchema>& candidates,
                     const ToolCaller& caller);

// Strict catalog validation, the hallucination guard. Returns the call
// unchanged when every check passes, and otherwise throws an Error whose
// code names the failure:
//   hallucinated_api        unknown schema name
//   hallucinated_parameter  argument not declared by the schema
//   missing_parameter       required parameter absent
//   parameter_type_mismatch value does not match the declared type
const ApiCall& validate(const ApiCall& call, const std::vector<ApiSchema>& catalog);

// Executes a validated call: POST {"arguments": {...}} to the schema's
// endpoint. Network failures and timeouts surface as status == error with
// a diagnostic body; execute never throws on transport faults.
ApiResponse execute(const ApiCall& call, const std::vector<ApiSchema>& catalog,
                    int timeout_ms, const std::string& bearer_token = "");

} // namespace dynarag
