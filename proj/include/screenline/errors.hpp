#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace screenline {

enum class ErrorCode {
    schema,
    validation,
    shape,
    empty_menu,
    variant,
    no_affordable_item,
    assumption_violated,
    infeasible_input,
    too_large,
    infeasible,
    grid,
    family_mismatch,
    no_metric,
    empty_tail,
};

constexpr std::string_view error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::schema: return "SchemaError";
    case ErrorCode::validation: return "ValidationError";
    case ErrorCode::shape: return "ShapeError";
    case ErrorCode::empty_menu: return "EmptyMenu";
    case ErrorCode::variant: return "VariantError";
    case ErrorCode::no_affordable_item: return "NoAffordableItem";
    case ErrorCode::assumption_violated: return "AssumptionViolated";
    case ErrorCode::infeasible_input: return "InfeasibleInput";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::infeasible: return "Infeasible";
    case ErrorCode::grid: return "GridError";
    case ErrorCode::family_mismatch: return "FamilyMismatch";
    case ErrorCode::no_metric: return "NoMetric";
    case ErrorCode::empty_tail: return "EmptyTail";
    }
    return "Error";
}

/// Every failure raised by the toolkit. The code identifies the module
/// error; the message names the offending field or point where one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace screenline
