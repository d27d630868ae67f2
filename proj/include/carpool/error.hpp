#ifndef CARPOOL_ERROR_HPP
#define CARPOOL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace carpool {

/// Machine-readable failure categories. Every exception thrown by the
/// library carries one of these so the CLI can report it structurally.
enum class ErrorCode {
    InvalidArgument,
    DuplicateId,
    UnknownEndpoint,
    SelfLoop,
    UnknownNode,
    InvalidLine,
    NetworkTooLarge,
    NoIntersection,
    LineMismatch,
    GridMismatch,
    ZeroRate,
    ZeroPopulation,
    RoutingFailed,
    InfeasibleScenario,
    ParseError,
    EmptyInput,
    InvariantViolation,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse failure that remembers where it happened.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& message)
        : Error(ErrorCode::ParseError, file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

}  // namespace carpool

#endif  // CARPOOL_ERROR_HPP
