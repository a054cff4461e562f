#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace corrdetail {

// Error taxonomy shared by all modules. kind() is stable and machine-readable;
// the CLI maps it into its one-line JSON error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// Operand dimensions do not fit the operation.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error("shape", msg) {}
};

// Non-finite values where finite ones are required, or diverging computations.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error("numeric", msg) {}
};

// Invalid configuration structs (quotas, fusion thresholds, d_k mismatches).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

// Malformed or inconsistent input data (parse failures, missing fixtures).
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error("data", msg) {}
};

// Argument values outside an operation's domain.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain", msg) {}
};

} // namespace corrdetail
