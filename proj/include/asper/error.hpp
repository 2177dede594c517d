#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asper {

/// Malformed or invalid user input (files, flags, values).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error with a 1-based source location.
class ParseError : public InputError {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : InputError(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// The number of free decision variables in a sentence exceeds the configured cap.
class SolverCapError : public std::runtime_error {
public:
    SolverCapError(const std::string& sentence_id, std::size_t count, std::size_t cap)
        : std::runtime_error("too many doubtful atoms in sentence '" + sentence_id + "': " +
                             std::to_string(count) + " > " + std::to_string(cap)),
          sentence_id_(sentence_id) {}

    const std::string& sentence_id() const noexcept { return sentence_id_; }

private:
    std::string sentence_id_;
};

} // namespace asper
