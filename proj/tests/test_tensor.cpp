#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>
#include <Eigen/LU>

#include "support.hpp"
#include "tensorlab/dense_tensor.hpp"
#include "tensorlab/f2.hpp"

using namespace tensorlab;
using namespace tensorlab::testing;

namespace {

// Direct triple sum, kept separate from the mode-product implementation.
DenseTensor act_by_sum(const DenseTensor& t, const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    const Dims d = t.dims();
    DenseTensor out(d);
    for (int i1 = 0; i1 < d.p; ++i1)
        for (int j1 = 0; j1 < d.q; ++j1)
            for (int k1 = 0; k1 < d.r; ++k1) {
                Scalar s = 0.0;
                for (int i2 = 0; i2 < d.p; ++i2)
                    for (int j2 = 0; j2 < d.q; ++j2)
                        for (int k2 = 0; k2 < d.r; ++k2) s += a(i1, i2) * b(j1, j2) * c(k1, k2) * t(i2, j2, k2);
                out(i1, j1, k1) = s;
            }
    return out;
}

} // namespace

TEST_CASE("outer product entries are products of the factors") {
    const DenseTensor t = outer_product(vec({1, 0, 0}), vec({1, 0, 0}), vec({1, 0, 0}));
    CHECK(t(0, 0, 0) == Scalar(1.0));
    int nonzero = 0;
    for (Scalar z : t.entries()) nonzero += z != Scalar(0.0);
    CHECK(nonzero == 1);

    const DenseTensor u = outer_product(vec({1, 1}), vec({1, 0}), vec({1, 0}));
    CHECK(u.dims() == Dims{2, 2, 2});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) CHECK(u(i, j, k) == Scalar((j == 0 && k == 0) ? 1.0 : 0.0));

    std::mt19937_64 rng(3);
    const CVector a = random_vector(3, rng), b = random_vector(2, rng), c = random_vector(3, rng);
    const DenseTensor w = outer_product(a, b, c);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 3; ++k) CHECK(w(i, j, k) == a(i) * b(j) * c(k));
}

TEST_CASE("corner simple array over F2 encodes to 1") {
    const DenseTensor t = outer_product(vec({0, 0, 1}), vec({0, 0, 1}), vec({0, 0, 1}));
    CHECK(encode(t) == 1u);
}

TEST_CASE("simple terms reject zero factors") {
    CHECK_THROWS_AS(make_simple_term(vec({0, 0}), vec({1, 0}), vec({1, 0})), std::invalid_argument);
    CHECK_NOTHROW(make_simple_term(vec({1, 0}), vec({1, 0}), vec({1, 0})));
}

TEST_CASE("tensor construction validates count and finiteness") {
    CHECK_THROWS_AS(DenseTensor(Dims{2, 2, 2}, std::vector<Scalar>(7)), std::invalid_argument);
    std::vector<Scalar> e(8);
    e[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DenseTensor(Dims{2, 2, 2}, e), std::invalid_argument);
    e[3] = {0.0, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(DenseTensor(Dims{2, 2, 2}, e), std::invalid_argument);
    CHECK_THROWS_AS(DenseTensor(Dims{4, 1, 1}), std::invalid_argument);
}

TEST_CASE("slices") {
    const DenseTensor u = outer_product(vec({1, 1}), vec({1, 0}), vec({1, 0}));
    CHECK(slice(u, Direction::frontal, 0) == mat(2, 2, {1, 0, 1, 0}));
    CHECK(slice(DenseTensor(Dims{3, 2, 3}), Direction::horizontal, 2).isZero(0.0));

    std::mt19937_64 rng(5);
    const DenseTensor t = random_tensor(Dims{2, 3, 3}, rng);
    const CMatrix h = slice(t, Direction::horizontal, 1), v = slice(t, Direction::vertical, 2),
                  f = slice(t, Direction::frontal, 0);
    CHECK(h.rows() == 3);
    CHECK(h.cols() == 3);
    CHECK(v.rows() == 2);
    CHECK(v.cols() == 3);
    CHECK(f.rows() == 2);
    CHECK(f.cols() == 3);
    CHECK(h(2, 1) == t(1, 2, 1));
    CHECK(v(1, 2) == t(1, 2, 2));
    CHECK(f(1, 2) == t(1, 2, 0));

    // The frontal slices side by side are the matrix form, and rebuild the array.
    const DenseTensor back = DenseTensor::from_frontal(std::vector<CMatrix>{t.frontal(0), t.frontal(1), t.frontal(2)});
    CHECK(back == t);

    CHECK_THROWS_AS(slice(t, Direction::horizontal, 2), std::out_of_range);
    CHECK_THROWS_WITH(slice(t, Direction::horizontal, 2), doctest::Contains("3"));
}

TEST_CASE("act agrees with the triple sum") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 20; ++n) {
        const Dims d{1 + n % 3, 1 + (n / 3) % 3, 3};
        const DenseTensor t = random_tensor(d, rng);
        const CMatrix a = random_matrix(d.p, rng), b = random_matrix(d.q, rng), c = random_matrix(d.r, rng);
        CHECK(approx_equal(act(t, a, b, c), act_by_sum(t, a, b, c), 1e-12));
    }
}

TEST_CASE("act by identity is the identity") {
    std::mt19937_64 rng(1);
    const DenseTensor t = random_tensor(Dims{3, 2, 3}, rng);
    CHECK(act(t, CMatrix::Identity(3, 3), CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)) == t);
}

TEST_CASE("frontal swap by an exchange matrix") {
    std::mt19937_64 rng(2);
    const DenseTensor t = random_tensor(Dims{2, 2, 2}, rng);
    const CMatrix swap = mat(2, 2, {0, 1, 1, 0}), eye = CMatrix::Identity(2, 2);
    const DenseTensor s = act(t, eye, eye, swap);
    CHECK(s.frontal(0) == t.frontal(1));
    CHECK(s.frontal(1) == t.frontal(0));
}

TEST_CASE("act rejects singular and mis-sized matrices") {
    const DenseTensor t(Dims{2, 2, 2});
    const CMatrix eye = CMatrix::Identity(2, 2);
    CHECK_THROWS_AS(act(t, CMatrix::Zero(2, 2), eye, eye), std::invalid_argument);
    CHECK_THROWS_AS(act(t, CMatrix::Identity(3, 3), eye, eye), std::invalid_argument);
}

TEST_CASE("acting on a term matches acting on its array") {
    std::mt19937_64 rng(4);
    for (int n = 0; n < 10; ++n) {
        const SimpleTerm term{random_vector(3, rng), random_vector(3, rng), random_vector(2, rng)};
        const CMatrix a = random_matrix(3, rng), b = random_matrix(3, rng), c = random_matrix(2, rng);
        const SimpleTerm moved = transform(term, a, b, c);
        CHECK(approx_equal(to_tensor(moved), act(to_tensor(term), a, b, c), 1e-12));
        CHECK(approx_equal(to_tensor(moved), outer_product(a * term.a, b * term.b, c * term.c), 0.0));
    }
}

TEST_CASE("act followed by the inverse action restores the array") {
    std::mt19937_64 rng(8);
    for (int n = 0; n < 20; ++n) {
        const DenseTensor t = random_tensor(Dims{3, 3, 3}, rng);
        const CMatrix a = random_matrix(3, rng), b = random_matrix(3, rng), c = random_matrix(3, rng);
        const DenseTensor back = act(act(t, a, b, c), a.inverse(), b.inverse(), c.inverse());
        CHECK(approx_equal(back, t, 1e-9));
    }
}

TEST_CASE("direction permutations move indices") {
    std::mt19937_64 rng(6);
    const DenseTensor t = random_tensor(Dims{1, 2, 3}, rng);
    const DirectionPerm perm{2, 0, 1};
    const DenseTensor s = permute_directions(t, perm);
    CHECK(s.dims() == Dims{3, 1, 2});
    for (int i = 0; i < 1; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 3; ++k) {
                const std::array<int, 3> idx{i, j, k};
                CHECK(s(idx[perm[0]], idx[perm[1]], idx[perm[2]]) == t(i, j, k));
            }
    CHECK(permute_directions(s, inverse(perm)) == t);

    const SimpleTerm term{random_vector(1, rng), random_vector(2, rng), random_vector(3, rng)};
    // Products are formed in a different order, so equality holds up to rounding.
    CHECK(approx_equal(to_tensor(permute_directions(term, perm)), permute_directions(to_tensor(term), perm), 1e-15));
}

TEST_CASE("evaluate") {
    Decomposition empty;
    empty.dims = Dims{3, 3, 2};
    CHECK(evaluate(empty).is_zero());

    std::mt19937_64 rng(9);
    const SimpleTerm term{random_vector(2, rng), random_vector(2, rng), random_vector(2, rng)};
    Decomposition one;
    one.dims = Dims{2, 2, 2};
    one.terms.push_back(term);
    CHECK(evaluate(one) == outer_product(term.a, term.b, term.c));

    // Superdiagonal pattern with entries alpha and beta from two corner terms.
    Decomposition two;
    two.dims = Dims{2, 2, 2};
    const Scalar alpha{2.0, 1.0}, beta{-3.0, 0.5};
    two.terms.push_back({vec({alpha, 0}), vec({1, 0}), vec({1, 0})});
    two.terms.push_back({vec({0, beta}), vec({0, 1}), vec({0, 1})});
    const DenseTensor x = evaluate(two);
    CHECK(x(0, 0, 0) == alpha);
    CHECK(x(1, 1, 1) == beta);
    CHECK(x.max_norm() == doctest::Approx(std::abs(beta)));

    Decomposition bad;
    bad.dims = Dims{2, 2, 2};
    bad.terms.push_back({vec({1, 0, 0}), vec({1, 0}), vec({1, 0})});
    CHECK_THROWS_AS(evaluate(bad), std::invalid_argument);
}

TEST_CASE("four-term sum for the identity against the shift") {
    // a (x) b (x) c sums that reproduce [I | shift] in the 3x3x2 format.
    Decomposition d;
    d.dims = Dims{3, 3, 2};
    d.terms.push_back({vec({1, 0.5, 0}), vec({0, 1, 0}), vec({1, 1})});
    d.terms.push_back({vec({0, 1, 0}), vec({0, -0.5, 1}), vec({-1, 1})});
    d.terms.push_back({vec({1, 0, 0}), vec({1, -1, 0}), vec({1, 0})});
    d.terms.push_back({vec({0, 1, 1}), vec({0, 0, 1}), vec({1, 0})});
    const DenseTensor x = evaluate(d);
    CHECK(x.frontal(0) == CMatrix(CMatrix::Identity(3, 3)));
    CHECK(x.frontal(1) == mat(3, 3, {0, 1, 0, 0, 0, 1, 0, 0, 0}));
}

TEST_CASE("approximate equality is relative to the larger operand") {
    DenseTensor a(Dims{1, 1, 2}, {1e6, 0.0});
    DenseTensor b(Dims{1, 1, 2}, {1e6 + 1e-4, 0.0});
    CHECK(approx_equal(a, b));
    CHECK_FALSE(approx_equal(a, b, 1e-12));
    CHECK(approx_equal(DenseTensor(Dims{1, 1, 1}), DenseTensor(Dims{1, 1, 1})));
}
