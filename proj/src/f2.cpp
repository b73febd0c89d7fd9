#include "tensorlab/f2.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace tensorlab {

F2Matrix::F2Matrix(int n, std::array<std::uint8_t, 3> rows) : n_(n), rows_(rows) {
    if (n < 1 || n > 3) throw std::invalid_argument(fmt::format("F2 matrix order {} outside 1..3", n));
    const std::uint8_t mask = static_cast<std::uint8_t>((1u << n) - 1);
    for (int u = 0; u < 3; ++u) {
        if (u >= n ? rows_[u] != 0 : (rows_[u] & ~mask) != 0) {
            throw std::invalid_argument("F2 matrix row has bits beyond its order");
        }
    }
}

F2Matrix F2Matrix::identity(int n) {
    std::array<std::uint8_t, 3> rows{};
    for (int u = 0; u < n; ++u) rows[u] = static_cast<std::uint8_t>(1u << u);
    return F2Matrix(n, rows);
}

F2Matrix F2Matrix::from_entries(int n, std::initializer_list<int> entries) {
    if (static_cast<int>(entries.size()) != n * n) throw std::invalid_argument("wrong number of F2 matrix entries");
    std::array<std::uint8_t, 3> rows{};
    int pos = 0;
    for (int e : entries) {
        if (e != 0 && e != 1) throw std::invalid_argument("F2 matrix entry outside {0, 1}");
        if (e) rows[pos / n] |= static_cast<std::uint8_t>(1u << (pos % n));
        ++pos;
    }
    return F2Matrix(n, rows);
}

F2Matrix operator*(const F2Matrix& x, const F2Matrix& y) {
    if (x.n_ != y.n_) throw std::invalid_argument("F2 matrix orders differ");
    std::array<std::uint8_t, 3> rows{};
    // Row u of xy is the XOR of the rows of y selected by row u of x.
    for (int u = 0; u < x.n_; ++u)
        for (int t = 0; t < x.n_; ++t)
            if (x.at(u, t)) rows[u] ^= y.rows_[t];
    return F2Matrix(x.n_, rows);
}

bool F2Matrix::invertible() const {
    std::array<std::uint8_t, 3> r = rows_;
    for (int col = 0; col < n_; ++col) {
        int pivot = -1;
        for (int u = col; u < n_; ++u)
            if ((r[u] >> col) & 1u) {
                pivot = u;
                break;
            }
        if (pivot < 0) return false;
        std::swap(r[col], r[pivot]);
        for (int u = 0; u < n_; ++u)
            if (u != col && ((r[u] >> col) & 1u)) r[u] ^= r[col];
    }
    return true;
}

F2Matrix F2Matrix::inverse() const {
    std::array<std::uint8_t, 3> r = rows_;
    std::array<std::uint8_t, 3> inv = identity(n_).rows_;
    for (int col = 0; col < n_; ++col) {
        int pivot = -1;
        for (int u = col; u < n_; ++u)
            if ((r[u] >> col) & 1u) {
                pivot = u;
                break;
            }
        if (pivot < 0) throw std::invalid_argument("singular F2 matrix");
        std::swap(r[col], r[pivot]);
        std::swap(inv[col], inv[pivot]);
        for (int u = 0; u < n_; ++u)
            if (u != col && ((r[u] >> col) & 1u)) {
                r[u] ^= r[col];
                inv[u] ^= inv[col];
            }
    }
    return F2Matrix(n_, inv);
}

CMatrix F2Matrix::to_complex() const {
    CMatrix m = CMatrix::Zero(n_, n_);
    for (int u = 0; u < n_; ++u)
        for (int t = 0; t < n_; ++t)
            if (at(u, t)) m(u, t) = 1.0;
    return m;
}

GroupElement::GroupElement(F2Matrix a, F2Matrix b, F2Matrix c, DirectionPerm perm)
    : a_(a), b_(b), c_(c), perm_(perm) {
    for (const F2Matrix* m : {&a_, &b_, &c_}) {
        if (!m->invertible()) throw std::invalid_argument("group element matrix has zero determinant over F2");
    }
    (void)tensorlab::inverse(perm_); // validates
}

GroupElement GroupElement::identity(Dims d) {
    return GroupElement(F2Matrix::identity(d.p), F2Matrix::identity(d.q), F2Matrix::identity(d.r));
}

GroupElement GroupElement::inverse() const {
    // x -> P(Mx) inverts to y -> P^-1(M'y) with M'_d = (M_{perm[d]})^-1.
    return GroupElement(matrix(perm_[0]).inverse(), matrix(perm_[1]).inverse(), matrix(perm_[2]).inverse(),
                        tensorlab::inverse(perm_));
}

F2Code encode(const DenseTensor& t) {
    const Dims d = t.dims();
    F2Code code = 0;
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) {
                const Scalar z = t(i, j, k);
                if (z == Scalar{1.0}) {
                    code |= F2Code{1} << f2_bit(d, i, j, k);
                } else if (z != Scalar{}) {
                    throw std::invalid_argument(
                        fmt::format("entry ({},{},{}) is not 0 or 1 over F2", i + 1, j + 1, k + 1));
                }
            }
    return code;
}

DenseTensor decode(F2Code code, Dims d) {
    DenseTensor t(d);
    if (code > f2_code_limit(d)) {
        throw std::out_of_range(fmt::format("code {} exceeds {} bits of a {}x{}x{} array", code, d.size(), d.p, d.q, d.r));
    }
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k)
                if ((code >> f2_bit(d, i, j, k)) & 1u) t(i, j, k) = 1.0;
    return t;
}

LinearCodeMap::LinearCodeMap(Dims d, int direction, const F2Matrix& m) : n_(d[direction]) {
    if (m.order() != n_) throw std::invalid_argument("matrix order does not match direction size");
    const int stride = direction == 0 ? d.q * d.r : direction == 1 ? d.r : 1;
    // Plane t holds the bits whose index along `direction` is t; shifting by
    // t * stride moves plane t onto plane 0.
    F2Code plane0 = 0;
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) {
                const int idx = direction == 0 ? i : direction == 1 ? j : k;
                if (idx == 0) plane0 |= F2Code{1} << f2_bit(d, i, j, k);
            }
    for (int t = 0; t < n_; ++t) {
        shift_[t] = t * stride;
        mask_[t] = plane0 >> shift_[t];
        rows_[t] = m.row(t);
    }
}

PermutationCodeMap::PermutationCodeMap(Dims d, const DirectionPerm& perm)
    : target_{d[perm[0]], d[perm[1]], d[perm[2]]}, destination_(d.size()) {
    (void)inverse(perm);
    std::array<int, 3> idx{};
    for (idx[0] = 0; idx[0] < d.p; ++idx[0])
        for (idx[1] = 0; idx[1] < d.q; ++idx[1])
            for (idx[2] = 0; idx[2] < d.r; ++idx[2]) {
                destination_[f2_bit(d, idx[0], idx[1], idx[2])] =
                    f2_bit(target_, idx[perm[0]], idx[perm[1]], idx[perm[2]]);
            }
}

F2Code PermutationCodeMap::operator()(F2Code x) const {
    F2Code out = 0;
    for (int b = 0; x != 0; ++b, x >>= 1)
        if (x & 1u) out |= F2Code{1} << destination_[b];
    return out;
}

F2Code act(F2Code x, Dims d, const GroupElement& g) {
    for (int dir = 0; dir < 3; ++dir) {
        if (g.matrix(dir).order() != d[dir]) throw std::invalid_argument("group element does not match the format");
        x = LinearCodeMap(d, dir, g.matrix(dir))(x);
    }
    const PermutationCodeMap perm(d, g.perm());
    if (perm.target_dims() != d) throw std::invalid_argument("permutation changes the format");
    return perm(x);
}

DenseTensor act(const DenseTensor& t, const GroupElement& g) {
    return permute_directions(act(t, g.a().to_complex(), g.b().to_complex(), g.c().to_complex()), g.perm());
}

std::vector<F2Matrix> gl_f2_generators(int n) {
    switch (n) {
    case 1:
        return {};
    case 2:
        return {F2Matrix::from_entries(2, {0, 1, 1, 0}), F2Matrix::from_entries(2, {1, 0, 1, 1})};
    case 3:
        // e1 -> e2 -> e3 -> e1, and e1 -> e1 + e2.
        return {F2Matrix::from_entries(3, {0, 0, 1, 1, 0, 0, 0, 1, 0}),
                F2Matrix::from_entries(3, {1, 0, 0, 1, 1, 0, 0, 0, 1})};
    default:
        throw std::invalid_argument(fmt::format("matrix order {} outside 1..3", n));
    }
}

std::vector<F2Matrix> gl_f2_elements(int n) {
    const std::vector<F2Matrix> gens = gl_f2_generators(n);
    std::set<F2Matrix> seen{F2Matrix::identity(n)};
    std::vector<F2Matrix> frontier{F2Matrix::identity(n)};
    while (!frontier.empty()) {
        std::vector<F2Matrix> next;
        for (const F2Matrix& m : frontier)
            for (const F2Matrix& g : gens) {
                const F2Matrix h = g * m;
                if (seen.insert(h).second) next.push_back(h);
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

std::vector<F2Matrix> gl3_f2_elements() { return gl_f2_elements(3); }

std::vector<GroupElement> census_generators(Dims d) {
    std::vector<GroupElement> out;
    for (int dir = 0; dir < 3; ++dir) {
        for (const F2Matrix& m : gl_f2_generators(d[dir])) {
            std::array<F2Matrix, 3> ms{F2Matrix::identity(d.p), F2Matrix::identity(d.q), F2Matrix::identity(d.r)};
            ms[dir] = m;
            out.emplace_back(ms[0], ms[1], ms[2]);
        }
    }
    return out;
}

std::vector<DirectionPerm> format_preserving_perms(Dims d) {
    std::vector<DirectionPerm> out;
    DirectionPerm perm = identity_perm;
    do {
        if (d[perm[0]] == d.p && d[perm[1]] == d.q && d[perm[2]] == d.r) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

GroupElement random_group_element(Dims d, std::mt19937_64& rng, bool with_perm) {
    std::array<F2Matrix, 3> ms;
    for (int dir = 0; dir < 3; ++dir) {
        const std::vector<F2Matrix> all = gl_f2_elements(d[dir]);
        ms[dir] = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
    }
    DirectionPerm perm = identity_perm;
    if (with_perm) {
        const std::vector<DirectionPerm> perms = format_preserving_perms(d);
        perm = perms[std::uniform_int_distribution<std::size_t>(0, perms.size() - 1)(rng)];
    }
    return GroupElement(ms[0], ms[1], ms[2], perm);
}

} // namespace tensorlab
