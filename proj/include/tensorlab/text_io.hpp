#pragma once

#include <string>
#include <string_view>

#include "tensorlab/dense_tensor.hpp"
#include "tensorlab/f2.hpp"

namespace tensorlab {

/// Reads "p q r" followed by p*q*r scalars in lex order. A scalar is "re",
/// "re+imi", "re-imi" or "imi". A single decimal or 0x-hex integer in place
/// of the scalars is an F2 code. Throws ParseError.
DenseTensor parse_tensor(std::string_view text);

/// Like parse_tensor() but requires entries in {0, 1}.
F2Code parse_f2_tensor(std::string_view text, Dims& dims);

std::string format_scalar(Scalar z);

/// "p q r" then one line per (i, j) holding the r entries along k.
std::string format_tensor(const DenseTensor& t);

/// "p q r", the term count, one "a ; b ; c" line per term, then "residual X".
std::string format_decomposition(const Decomposition& d);
Decomposition parse_decomposition(std::string_view text);

/// 27-character pattern with '.' for 0 and '1' for 1, in lex order.
std::string dots_pattern(F2Code code, Dims d);

} // namespace tensorlab
