#pragma once

#include <stdexcept>
#include <string>

namespace tensorlab {

/// Malformed tensor text or decomposition text. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, int column);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// A decomposition routine hit a state its case analysis says cannot occur,
/// or produced a residual above tolerance after all retries.
class DecompositionFailure : public std::runtime_error {
public:
    DecompositionFailure(std::string case_label, const std::string& detail);

    const std::string& case_label() const noexcept { return case_label_; }

private:
    std::string case_label_;
};

/// A matrix that must be inverted is too close to singular.
class IllConditioned : public std::runtime_error {
public:
    IllConditioned(const std::string& what, double condition);

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace tensorlab
