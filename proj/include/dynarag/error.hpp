#pragma once

#include <stdexcept>
#include <string>

namespace dynarag {

// Error taxonomy shared by the whole library. Structured failure paths
// (validation rejections, scorer failures, parse errors) carry one of
// these codes so callers and the C boundary can dispatch on them.
enum class ErrorCode {
    invalid_argument,
    parse_error,
    io_error,
    duplicate_id,
    rank_collision,
    scorer_failure,
    embedder_failure,
    caller_failure,
    generator_failure,
    hallucinated_api,
    hallucinated_parameter,
    missing_parameter,
    parameter_type_mismatch,
    budget_exceeded,
    config_error,
    internal_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace dynarag
