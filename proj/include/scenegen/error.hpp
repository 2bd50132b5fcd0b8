#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace scenegen {

// Broad failure classes; the CLI maps each to a distinct exit code.
enum class ErrorKind { usage, input, oracle, pipeline };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::string code = "")
        : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const { return kind_; }

    // Stable machine-readable tag, e.g. "no-root" or "room-too-small".
    const std::string& code() const { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::usage: return "usage";
        case ErrorKind::input: return "input";
        case ErrorKind::oracle: return "oracle";
        case ErrorKind::pipeline: return "pipeline";
    }
    return "unknown";
}

} // namespace scenegen
