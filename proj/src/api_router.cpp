#include "dynarag/api_router.hpp"

#include "dynarag/error.hpp"
#include "dynarag/http_client.hpp"
#include "dynarag/text.hpp"

#include <algorithm>

namespace dynarag {

using nlohmann::ordered_json;

ApiCall KeywordToolCaller::propose_call(const std::string& query_text,
                                        const std::vector<ApiSchema>& candidates) const {
    if (candidates.empty()) {
        throw Error(ErrorCode::caller_failure, "no candidate schemas to choose from");
    }

    auto query_terms = text::content_term_set(query_text);
    const ApiSchema* chosen = &candidates.front();
    double best = -1.0;
    for (const auto& candidate : candidates) {
        double overlap = text::term_overlap(
            query_terms, candidate.name + " " + candidate.description);
        if (overlap > best) {
            best = overlap;
            chosen = &candidate;
        }
    }

    ApiCall call;
    call.schema_name = chosen->name;
    for (const auto& param : chosen->parameters) {
        if (!param.required) continue;
        switch (param.type) {
            case ParamType::string_type: {
                std::string span = text::longest_capitalized_span(query_text);
                if (span.empty()) {
                    throw Error(ErrorCode::caller_failure,
                                "cannot fill required string parameter \"" + param.name +
                                    "\": no capitalized span in query");
                }
                call.arguments[param.name] = span;
                break;
            }
            case ParamType::integer_type: {
                long long value = 0;
                if (!text::first_integer(query_text, value)) {
                    throw Error(ErrorCode::caller_failure,
                                "cannot fill required integer parameter \"" + param.name +
                                    "\": no integer in query");
                }
                call.arguments[param.name] = value;
                break;
            }
            case ParamType::number_type: {
                double value = 0.0;
                if (!text::first_number(query_text, value)) {
                    throw Error(ErrorCode::caller_failure,
                                "cannot fill required number parameter \"" + param.name +
                                    "\": no number in query");
                }
                call.arguments[param.name] = value;
                break;
            }
            case ParamType::boolean_type:
                throw Error(ErrorCode::caller_failure,
                            "cannot infer required boolean parameter \"" + param.name + "\"");
        }
    }
    return call;
}

RemoteToolCaller::RemoteToolCaller(std::string endpoint, std::string bearer_token,
                                   int timeout_ms)
    : endpoint_(std::move(endpoint)), bearer_token_(std::move(bearer_token)),
      timeout_ms_(timeout_ms) {
    if (endpoint_.empty()) {
        throw Error(ErrorCode::config_error, "remote tool caller requires an endpoint");
    }
}

ApiCall RemoteToolCaller::propose_call(const std::string& query_text,
                                       const std::vector<ApiSchema>& candidates) const {
    ordered_json request;
    request["query"] = query_text;
    request["candidates"] = nlohmann::json::parse(serialize_catalog(candidates));

    HttpResult response = post_json(endpoint_, request.dump(), timeout_ms_, bearer_token_);
    if (!response.ok()) {
        throw Error(ErrorCode::caller_failure,
                    "remote tool caller failed: " +
                        (response.transport_ok ? "HTTP " + std::to_string(response.status)
                                               : response.error));
    }
    ordered_json body = ordered_json::parse(response.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("schema_name") ||
        !body["schema_name"].is_string()) {
        throw Error(ErrorCode::caller_failure,
                    "remote tool caller did not return a call: " + response.body);
    }
    ApiCall call;
    call.schema_name = body["schema_name"].get<std::string>();
    if (body.contains("arguments")) {
        if (!body["arguments"].is_object()) {
            throw Error(ErrorCode::caller_failure, "remote call arguments must be an object");
        }
        call.arguments = body["arguments"];
    }
    return call;
}

ApiCall propose_call(const Query& query, const std::vector<ApiSchema>& candidates,
                     const ToolCaller& caller) {
    if (candidates.empty()) {
        throw Error(ErrorCode::caller_failure, "no candidate schemas for query " + query.id);
    }
    return caller.propose_call(query.text, candidates);
}

namespace {

bool value_matches(ParamType type, const nlohmann::json& value) {
    switch (type) {
        case ParamType::string_type: return value.is_string();
        case ParamType::integer_type: return value.is_number_integer();
        case ParamType::number_type: return value.is_number();
        case ParamType::boolean_type: return value.is_boolean();
    }
    return false;
}

} // namespace

const ApiCall& validate(const ApiCall& call, const std::vector<ApiSchema>& catalog) {
    const ApiSchema* schema = nullptr;
    for (const auto& candidate : catalog) {
        if (candidate.name == call.schema_name) {
            schema = &candidate;
            break;
        }
    }
    if (!schema) {
        throw Error(ErrorCode::hallucinated_api,
                    "call names unknown API \"" + call.schema_name + "\"");
    }

    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        const ApiParameter* param = nullptr;
        for (const auto& p : schema->parameters) {
            if (p.name == it.key()) {
                param = &p;
                break;
            }
        }
        if (!param) {
            throw Error(ErrorCode::hallucinated_parameter,
                        "call to \"" + schema->name + "\" passes unknown parameter \"" +
                            it.key() + "\"");
        }
        if (!value_matches(param->type, it.value())) {
            throw Error(ErrorCode::parameter_type_mismatch,
                        "parameter \"" + param->name + "\" of \"" + schema->name +
                            "\" expects " + to_string(param->type) + ", got " +
                            std::string(it.value().type_name()));
        }
    }

    for (const auto& param : schema->parameters) {
        if (param.required && !call.arguments.contains(param.name)) {
            throw Error(ErrorCode::missing_parameter,
                        "call to \"" + schema->name + "\" misses required parameter \"" +
                            param.name + "\"");
        }
    }
    return call;
}

ApiResponse execute(const ApiCall& call, const std::vector<ApiSchema>& catalog,
                    int timeout_ms, const std::string& bearer_token) {
    ApiResponse out;
    const ApiSchema* schema = nullptr;
    for (const auto& candidate : catalog) {
        if (candidate.name == call.schema_name) {
            schema = &candidate;
            break;
        }
    }
    if (!schema) {
        out.body = "unknown API \"" + call.schema_name + "\"";
        return out;
    }

    ordered_json request;
    request["arguments"] = call.arguments;

    HttpResult response;
    try {
        response = post_json(schema->endpoint, request.dump(), timeout_ms, bearer_token);
    } catch (const Error& e) {
        out.body = e.what(); // bad endpoint URL in the catalog
        return out;
    }
    out.latency_ms = response.latency_ms;
    if (!response.transport_ok) {
        out.body = response.error;
        return out;
    }
    if (response.status < 200 || response.status >= 300) {
        out.body = "HTTP " + std::to_string(response.status) + ": " + response.body;
        return out;
    }
    out.status = ApiStatus::ok;
    out.body = response.body;
    return out;
}

} // namespace dynarag
