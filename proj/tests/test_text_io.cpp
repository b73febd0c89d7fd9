#include <random>
#include <string>

#include <doctest.h>

#include "support.hpp"
#include "tensorlab/errors.hpp"
#include "tensorlab/text_io.hpp"

using namespace tensorlab;
using namespace tensorlab::testing;

TEST_CASE("scalar syntax") {
    const DenseTensor t = parse_tensor("1 2 3\n 2 -1.5 3+4i\n3-4i -2i 1e-3+2.5E2i\n");
    CHECK(t(0, 0, 0) == Scalar(2.0));
    CHECK(t(0, 0, 1) == Scalar(-1.5));
    CHECK(t(0, 0, 2) == Scalar(3.0, 4.0));
    CHECK(t(0, 1, 0) == Scalar(3.0, -4.0));
    CHECK(t(0, 1, 1) == Scalar(0.0, -2.0));
    CHECK(t(0, 1, 2) == Scalar(1e-3, 250.0));
}

TEST_CASE("entries are read in lex order with comments skipped") {
    const DenseTensor t = parse_tensor("# header first\n2 1 2\n1 2 # first row\n3 4\n");
    CHECK(t(0, 0, 0) == Scalar(1.0));
    CHECK(t(0, 0, 1) == Scalar(2.0));
    CHECK(t(1, 0, 0) == Scalar(3.0));
    CHECK(t(1, 0, 1) == Scalar(4.0));
}

TEST_CASE("a single integer is an F2 code") {
    const DenseTensor t = parse_tensor("3 3 3\n1\n");
    CHECK(t(2, 2, 2) == Scalar(1.0));
    CHECK(t.frobenius_norm() == doctest::Approx(1.0));
    Dims d;
    CHECK(parse_f2_tensor("3 3 3 0x4000000", d) == (F2Code{1} << 26));
    CHECK(d == Dims{3, 3, 3});
    CHECK(parse_f2_tensor("2 2 2\n1 0 0 1 0 1 1 0\n", d) == 0b10010110u);
    CHECK_THROWS_AS(parse_f2_tensor("2 2 2 256", d), ParseError);
    CHECK_THROWS_AS(parse_f2_tensor("1 1 2 1 2", d), ParseError);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_tensor("2 2 2\n1 2 3\n4 x 6 7 8\n");
        FAIL("no exception");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
        CHECK(std::string(e.what()).find("line 3, column 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_tensor("2 2\n"), ParseError);
    CHECK_THROWS_AS(parse_tensor("4 1 1 1 2 3 4"), ParseError);
    CHECK_THROWS_AS(parse_tensor("1 1 3 1 2"), ParseError);
    CHECK_THROWS_AS(parse_tensor("1 1 6 1 2 3 4 5 6"), ParseError);
    CHECK_THROWS_AS(parse_tensor("1 1 2 1 2 3"), ParseError);
    CHECK_THROWS_AS(parse_tensor("1 1 2 1 nan"), ParseError);
}

TEST_CASE("tensor text round trip") {
    std::mt19937_64 rng(21);
    for (const Dims d : {Dims{3, 3, 3}, Dims{2, 3, 1}, Dims{1, 1, 1}}) {
        const DenseTensor t = random_tensor(d, rng);
        CHECK(parse_tensor(format_tensor(t)) == t);
    }
}

TEST_CASE("decomposition text round trip") {
    std::mt19937_64 rng(22);
    Decomposition d;
    d.dims = Dims{3, 2, 3};
    for (int n = 0; n < 4; ++n) d.terms.push_back({random_vector(3, rng), random_vector(2, rng), random_vector(3, rng)});
    d.residual = 1.25e-12;
    const Decomposition back = parse_decomposition(format_decomposition(d));
    CHECK(back.dims == d.dims);
    REQUIRE(back.size() == d.size());
    for (std::size_t n = 0; n < d.size(); ++n) {
        CHECK(back.terms[n].a == d.terms[n].a);
        CHECK(back.terms[n].b == d.terms[n].b);
        CHECK(back.terms[n].c == d.terms[n].c);
    }
    CHECK(back.residual == doctest::Approx(1.25e-12));

    CHECK_THROWS_AS(parse_decomposition("2 2 2\n1\n1 0 ; 1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_decomposition("2 2 2\n1\n1 0 ; 1 0 ; 1\n"), ParseError);
}

TEST_CASE("scalar formatting") {
    CHECK(format_scalar({1.0, 0.0}) == "1");
    CHECK(format_scalar({0.5, -2.0}) == "0.5-2i");
    CHECK(format_scalar({0.0, 3.0}) == "0+3i");
    CHECK(parse_tensor("1 1 1 " + format_scalar({-0.0, -3.5}))(0, 0, 0) == Scalar(0.0, -3.5));
}
