#pragma once

#include <stdexcept>
#include <string>

namespace rdslab {

/// Invalid parameters or inputs that fail a precondition before any compute.
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read, or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file contents. Carries the 1-based line number.
class parse_error : public io_error {
public:
    parse_error(const std::string& what, std::size_t line)
        : io_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A stochastic or constructive step failed (exhausted retries, degenerate statistic, ...).
class compute_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rdslab
