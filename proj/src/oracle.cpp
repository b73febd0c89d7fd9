#include "tensorlab/oracle.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace tensorlab {

namespace {

CVector bits_vector(unsigned bits, int n) {
    CVector v = CVector::Zero(n);
    for (int i = 0; i < n; ++i)
        if ((bits >> i) & 1u) v(i) = 1.0;
    return v;
}

} // namespace

std::vector<int> oracle_rank_table(Dims d) {
    if (!d.valid() || d.size() > oracle_max_bits) {
        throw std::invalid_argument(
            fmt::format("exhaustive rank search needs at most {} entries, got {}", oracle_max_bits, d.size()));
    }
    std::vector<F2Code> simple;
    for (unsigned a = 1; a < (1u << d.p); ++a)
        for (unsigned b = 1; b < (1u << d.q); ++b)
            for (unsigned c = 1; c < (1u << d.r); ++c)
                simple.push_back(encode(outer_product(bits_vector(a, d.p), bits_vector(b, d.q), bits_vector(c, d.r))));

    std::vector<int> rank(std::size_t{f2_code_limit(d)} + 1, -1);
    rank[0] = 0;
    std::vector<F2Code> level{0};
    for (int n = 1; !level.empty(); ++n) {
        std::vector<F2Code> next;
        for (F2Code x : level)
            for (F2Code s : simple) {
                const F2Code y = x ^ s;
                if (rank[y] < 0) {
                    rank[y] = n;
                    next.push_back(y);
                }
            }
        level = std::move(next);
    }
    return rank;
}

int oracle_rank(F2Code x, Dims d) {
    const std::vector<int> table = oracle_rank_table(d);
    if (x >= table.size()) throw std::out_of_range("code exceeds the format");
    return table[x];
}

} // namespace tensorlab
