#pragma once

#include <stdexcept>
#include <string>

namespace specfuse {

// Error categories, used by the CLI to map failures onto exit codes.
enum class ErrorKind {
    InvalidArgument,  // caller misuse (bad flag value, eps=0)
    InvalidData,      // non-finite payload, corrupt numeric content
    Shape,            // dimension mismatch between operands
    Format,           // malformed file (bad magic, truncation)
    Config,           // inconsistent configuration (filterbank too dense, ...)
    Alignment,        // frame-clock mismatch beyond tolerance
    Training,         // divergence during optimization
    Metric,           // metric undefined (empty input set)
    Domain,           // math domain violation
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

}  // namespace specfuse
