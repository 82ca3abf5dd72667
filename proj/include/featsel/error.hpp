#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace featsel {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data. Carries the 1-based line number when known.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t line_no = 0)
        : Error(line_no ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
    std::size_t line;
};

/// Invalid configuration. Collects every violated constraint at once.
struct ValidationError : Error {
    explicit ValidationError(std::vector<std::string> violated)
        : Error(join(violated)), violations(std::move(violated)) {}
    explicit ValidationError(const std::string& msg)
        : ValidationError(std::vector<std::string>{msg}) {}
    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }
};

/// An iterative solver hit its iteration cap before meeting its tolerance.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, long long iters)
        : Error(msg + " (after " + std::to_string(iters) + " iterations)"),
          iterations(iters) {}
    long long iterations;
};

}  // namespace featsel
