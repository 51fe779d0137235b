#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace paintmo {

enum class ErrorKind {
    contract,
    parse,
    data,
    schema,
    empty_set,
    degeneracy,
    too_few_points,
    precondition,
    numerical,
    infeasible,
    generation_underflow,
    evaluator,
    io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI and HTTP
/// layers can report it in machine-readable form.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw Error(ErrorKind::contract, message);
    }
}

} // namespace paintmo
