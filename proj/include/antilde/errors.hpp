#pragma once

#include <stdexcept>
#include <string>

namespace antilde {

/// Out-of-range or otherwise invalid arguments to an operation.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An omega-set computation was asked to run below the precision at which
/// membership is determined. Carries the precision that would have sufficed.
class PrecisionError : public std::runtime_error {
public:
    PrecisionError(int given, int required)
        : std::runtime_error("insufficient precision: m = " + std::to_string(given) +
                             ", required m >= " + std::to_string(required)),
          given_(given), required_(required) {}

    int given() const noexcept { return given_; }
    int required() const noexcept { return required_; }

private:
    int given_;
    int required_;
};

/// Malformed input file. The message names the line and field.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, std::string field, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested operation is outside the supported parameter range.
class ScopeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation contradicted a predicted identity. The message is the
/// serialized witness.
class FalsificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed-width arithmetic would have overflowed.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

} // namespace antilde
