#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include <doctest.h>
#include <Eigen/LU>

#include "tensorlab/f2.hpp"
#include "tensorlab/oracle.hpp"
#include "tensorlab/text_io.hpp"

using namespace tensorlab;

namespace {

constexpr Dims d333{3, 3, 3};
constexpr Dims d222{2, 2, 2};

// Group action over the integers followed by reduction mod 2.
F2Code act_mod2(F2Code x, Dims d, const GroupElement& g) {
    const DenseTensor t = act(decode(x, d), g.a().to_complex(), g.b().to_complex(), g.c().to_complex());
    DenseTensor reduced(d);
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) {
                const long v = std::lround(t(i, j, k).real());
                reduced(i, j, k) = static_cast<double>(((v % 2) + 2) % 2);
            }
    return encode(permute_directions(reduced, g.perm()));
}

std::string flatten(F2Code x, Dims d) {
    const DenseTensor t = decode(x, d);
    std::string s;
    for (Scalar z : t.entries()) s += z == Scalar(1.0) ? '1' : '0';
    return s;
}

long integer_det(const F2Matrix& m) { return std::lround(m.to_complex().determinant().real()); }

F2Code code_of(const std::string& pattern) {
    F2Code x = 0;
    for (char ch : pattern) x = (x << 1) | (ch == '1' ? 1u : 0u);
    return x;
}

} // namespace

TEST_CASE("encode and decode are inverse on every 2x2x2 code") {
    for (F2Code x = 0; x < 256; ++x) CHECK(encode(decode(x, d222)) == x);
}

TEST_CASE("encode and decode on random 3x3x3 codes") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<F2Code> pick(0, f2_code_limit(d333));
    for (int n = 0; n < 200; ++n) {
        const F2Code x = pick(rng);
        CHECK(encode(decode(x, d333)) == x);
    }
}

TEST_CASE("bit order puts x111 first and x333 last") {
    CHECK(encode(DenseTensor(d333)) == 0u);
    DenseTensor last(d333), first(d333);
    last(2, 2, 2) = 1.0;
    first(0, 0, 0) = 1.0;
    CHECK(encode(last) == 1u);
    CHECK(encode(first) == (F2Code{1} << 26));
}

TEST_CASE("integer order equals lex order of flattenings") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<F2Code> pick(1, f2_code_limit(d333));
    for (int n = 0; n < 200; ++n) {
        const F2Code x = pick(rng), y = pick(rng);
        CHECK((x < y) == (flatten(x, d333) < flatten(y, d333)));
    }
}

TEST_CASE("encode rejects non-binary entries and decode rejects wide codes") {
    DenseTensor t(d222);
    t(0, 1, 0) = 2.0;
    CHECK_THROWS_AS(encode(t), std::invalid_argument);
    CHECK_THROWS_AS(decode(256, d222), std::out_of_range);
}

TEST_CASE("GL3(F2) has 168 elements of determinant 1") {
    const std::vector<F2Matrix> all = gl3_f2_elements();
    CHECK(all.size() == 168);
    CHECK(std::find(all.begin(), all.end(), F2Matrix::identity(3)) != all.end());
    for (const F2Matrix& m : all) CHECK(std::abs(integer_det(m)) % 2 == 1);
    CHECK(gl_f2_elements(2).size() == 6);
    CHECK(gl_f2_elements(1).size() == 1);
}

TEST_CASE("F2 matrix inverse") {
    for (const F2Matrix& m : gl3_f2_elements()) {
        CHECK(m * m.inverse() == F2Matrix::identity(3));
        CHECK(m.inverse() * m == F2Matrix::identity(3));
    }
    const F2Matrix singular = F2Matrix::from_entries(3, {1, 1, 0, 1, 1, 0, 0, 0, 1});
    CHECK_FALSE(singular.invertible());
    CHECK_THROWS_AS(singular.inverse(), std::invalid_argument);
    CHECK_THROWS_AS(GroupElement(singular, F2Matrix::identity(3), F2Matrix::identity(3)), std::invalid_argument);
}

TEST_CASE("code maps agree with integer matrix action mod 2") {
    std::mt19937_64 rng(14);
    for (const Dims d : {d333, Dims{2, 3, 3}, Dims{2, 2, 3}, d222, Dims{1, 2, 3}}) {
        std::uniform_int_distribution<F2Code> pick(0, f2_code_limit(d));
        for (int n = 0; n < 50; ++n) {
            const GroupElement g = random_group_element(d, rng, true);
            const F2Code x = pick(rng);
            CHECK(act(x, d, g) == act_mod2(x, d, g));
        }
    }
}

TEST_CASE("the inverse element undoes the action") {
    std::mt19937_64 rng(15);
    std::uniform_int_distribution<F2Code> pick(0, f2_code_limit(d333));
    for (int n = 0; n < 100; ++n) {
        const GroupElement g = random_group_element(d333, rng, true);
        const F2Code x = pick(rng);
        CHECK(act(act(x, d333, g), d333, g.inverse()) == x);
    }
}

TEST_CASE("permutation code map matches the tensor permutation") {
    std::mt19937_64 rng(16);
    const Dims d{1, 2, 3};
    std::uniform_int_distribution<F2Code> pick(0, f2_code_limit(d));
    DirectionPerm perm = identity_perm;
    do {
        const PermutationCodeMap map(d, perm);
        for (int n = 0; n < 20; ++n) {
            const F2Code x = pick(rng);
            CHECK(map(x) == encode(permute_directions(decode(x, d), perm)));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("format preserving permutations") {
    CHECK(format_preserving_perms(d333).size() == 6);
    CHECK(format_preserving_perms(Dims{2, 3, 3}).size() == 2);
    CHECK(format_preserving_perms(Dims{1, 2, 3}).size() == 1);
}

TEST_CASE("census generators") {
    CHECK(census_generators(d333).size() == 6);
    CHECK(census_generators(d222).size() == 6);
    CHECK(census_generators(Dims{1, 3, 3}).size() == 4);
}

TEST_CASE("oracle ranks of small 2x2x2 cases") {
    CHECK(oracle_rank(0, d222) == 0);
    const DenseTensor simple = outer_product(Eigen::Vector2cd(1, 1), Eigen::Vector2cd(0, 1), Eigen::Vector2cd(1, 0));
    CHECK(oracle_rank(encode(simple), d222) == 1);
    // [I | shift]: x111 = x221 = x122 = 1.
    DenseTensor t(d222);
    t(0, 0, 0) = 1.0;
    t(1, 1, 0) = 1.0;
    t(0, 1, 1) = 1.0;
    CHECK(oracle_rank(encode(t), d222) == 3);
    CHECK_THROWS_AS(oracle_rank_table(Dims{2, 3, 3}), std::invalid_argument);
}

TEST_CASE("every simple 3x3x3 array is one of 343 codes") {
    std::set<F2Code> codes;
    for (unsigned a = 1; a < 8; ++a)
        for (unsigned b = 1; b < 8; ++b)
            for (unsigned c = 1; c < 8; ++c) {
                const auto v = [](unsigned m) { return Eigen::Vector3cd((m >> 2) & 1, (m >> 1) & 1, m & 1); };
                codes.insert(encode(outer_product(v(a), v(b), v(c))));
            }
    CHECK(codes.size() == 343);
}

TEST_CASE("oracle ranks are invariant under the group on 2x2x2") {
    std::mt19937_64 rng(17);
    const std::vector<int> ranks = oracle_rank_table(d222);
    for (F2Code x = 1; x < 256; ++x) {
        const GroupElement g = random_group_element(d222, rng, true);
        CHECK(ranks[act(x, d222, g)] == ranks[x]);
    }
}

TEST_CASE("dot patterns") {
    CHECK(dots_pattern(1, d333) == std::string(26, '.') + "1");
    CHECK(dots_pattern(code_of("..1.1.1...1.1...111...1111."), d333) == "..1.1.1...1.1...111...1111.");
}
