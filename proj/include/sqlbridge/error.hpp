#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqlbridge {

/// A syntax problem at a byte offset of the text handed to a parser.
struct SyntaxError {
    std::size_t position = 0;
    std::string message;

    bool operator==(const SyntaxError&) const = default;
};

/// Base of every error the toolchain raises. The CLI maps the subclasses onto
/// exit codes: IoError 1, ParseFailure/ValidationError 2, ExecutionError 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseFailure : public Error {
public:
    ParseFailure(std::size_t position, std::string message)
        : Error(std::move(message)), position_(position) {}

    std::size_t position() const noexcept { return position_; }
    SyntaxError syntax_error() const { return {position_, what()}; }

private:
    std::size_t position_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ExecutionError : public Error {
public:
    using Error::Error;
};

}  // namespace sqlbridge
