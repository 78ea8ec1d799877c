#include "dynarag/error.hpp"

namespace dynarag {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::io_error: return "io_error";
        case ErrorCode::duplicate_id: return "duplicate_id";
        case ErrorCode::rank_collision: return "rank_collision";
        case ErrorCode::scorer_failure: return "scorer_failure";
        case ErrorCode::embedder_failure: return "embedder_failure";
        case ErrorCode::caller_failure: return "caller_failure";
        case ErrorCode::generator_failure: return "generator_failure";
        case ErrorCode::hallucinated_api: return "hallucinated_api";
        case ErrorCode::hallucinated_parameter: return "hallucinated_parameter";
        case ErrorCode::missing_parameter: return "missing_parameter";
        case ErrorCode::parameter_type_mismatch: return "parameter_type_mismatch";
        case ErrorCode::budget_exceeded: return "budget_exceeded";
        case ErrorCode::config_error: return "config_error";
        case ErrorCode::internal_error: return "internal_error";
    }
    return "internal_error";
}

} // namespace dynarag
