#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace legalir {

/// Base class for data and validation failures (CLI exit code 2).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input at a known line of a file.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Bad arguments or configuration supplied by the caller (CLI exit code 1).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace legalir
