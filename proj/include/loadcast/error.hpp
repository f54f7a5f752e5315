#pragma once

#include <stdexcept>
#include <string>

namespace loadcast {

/// Bad input: malformed files, violated preconditions, out-of-range flags.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, non-invertible fits, degenerate samples.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-level CSV problem. Each kind is a distinct validation class.
class ParseError : public ValidationError {
public:
    enum class Kind { Header, Format, Gap, Duplicate, Unparsable, NonFinite, MissingCell, Constraint };

    ParseError(Kind kind, std::size_t row, const std::string& message)
        : ValidationError("row " + std::to_string(row) + ": " + message), kind_(kind), row_(row) {}

    Kind kind() const noexcept { return kind_; }
    /// 1-based data row (the header is row 0).
    std::size_t row() const noexcept { return row_; }

private:
    Kind kind_;
    std::size_t row_;
};

}  // namespace loadcast
