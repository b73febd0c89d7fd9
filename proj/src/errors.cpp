#include "tensorlab/errors.hpp"

#include <fmt/format.h>

namespace tensorlab {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(fmt::format("line {}, column {}: {}", line, column, what)), line_(line), column_(column) {}

DecompositionFailure::DecompositionFailure(std::string case_label, const std::string& detail)
    : std::runtime_error(fmt::format("decomposition failed in case {}: {}", case_label, detail)),
      case_label_(std::move(case_label)) {}

IllConditioned::IllConditioned(const std::string& what, double condition)
    : std::runtime_error(fmt::format("{} (condition number {:.3e})", what, condition)), condition_(condition) {}

} // namespace tensorlab
