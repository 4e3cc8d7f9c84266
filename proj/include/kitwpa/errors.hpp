#pragma once

#include <stdexcept>
#include <string>

namespace kitwpa {

enum class ErrorKind {
    InvalidParameter,  // a physical parameter violates its invariant
    OutOfRange,        // input outside a tabulated or solvable range
    Domain,            // physics-domain rejection: stop band, non-passive data, below vacuum
    StepSize,          // integrator instability; refine the step
    Data,              // malformed or degenerate measurement data
    Config,            // configuration file problem
    Io,                // file system / parse problem
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace kitwpa
