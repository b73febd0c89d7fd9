#pragma once

#include <vector>

#include "tensorlab/f2.hpp"

namespace tensorlab {

inline constexpr int oracle_max_bits = 12;

/// Rank of every code of the format by breadth-first search from 0, where one
/// step adds a simple array. Throws std::invalid_argument above 12 bits.
std::vector<int> oracle_rank_table(Dims d);

int oracle_rank(F2Code x, Dims d);

} // namespace tensorlab
