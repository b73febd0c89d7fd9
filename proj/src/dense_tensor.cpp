#include "tensorlab/dense_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>
#include <fmt/format.h>

namespace tensorlab {

namespace {

void require_valid(Dims d) {
    if (!d.valid()) {
        throw std::invalid_argument(fmt::format("dimensions {}x{}x{} outside 1..3", d.p, d.q, d.r));
    }
}

void require_square(const CMatrix& m, int n, const char* which) {
    if (m.rows() != n || m.cols() != n) {
        throw std::invalid_argument(
            fmt::format("matrix {} is {}x{}, expected {}x{}", which, m.rows(), m.cols(), n, n));
    }
}

void require_perm(const DirectionPerm& perm) {
    std::array<bool, 3> seen{};
    for (int d : perm) {
        if (d < 0 || d > 2 || seen[d]) throw std::invalid_argument("not a permutation of three directions");
        seen[d] = true;
    }
}

} // namespace

DirectionPerm inverse(const DirectionPerm& perm) {
    require_perm(perm);
    DirectionPerm inv{};
    for (int m = 0; m < 3; ++m) inv[perm[m]] = m;
    return inv;
}

DenseTensor::DenseTensor(Dims dims) : dims_(dims) {
    require_valid(dims);
    entries_.assign(dims.size(), Scalar{});
}

DenseTensor::DenseTensor(Dims dims, std::vector<Scalar> entries) : dims_(dims), entries_(std::move(entries)) {
    require_valid(dims);
    if (static_cast<int>(entries_.size()) != dims.size()) {
        throw std::invalid_argument(
            fmt::format("{} entries given for a {}x{}x{} array", entries_.size(), dims.p, dims.q, dims.r));
    }
    for (const Scalar& z : entries_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw std::invalid_argument("non-finite entry");
        }
    }
}

DenseTensor DenseTensor::from_frontal(std::span<const CMatrix> slices) {
    if (slices.empty()) throw std::invalid_argument("no slices");
    const Dims d{static_cast<int>(slices[0].rows()), static_cast<int>(slices[0].cols()),
                 static_cast<int>(slices.size())};
    DenseTensor t(d);
    for (int k = 0; k < d.r; ++k) {
        if (slices[k].rows() != d.p || slices[k].cols() != d.q) {
            throw std::invalid_argument("frontal slices differ in shape");
        }
        for (int i = 0; i < d.p; ++i)
            for (int j = 0; j < d.q; ++j) t(i, j, k) = slices[k](i, j);
    }
    return t;
}

CMatrix DenseTensor::frontal(int k) const { return slice(*this, Direction::frontal, k); }

double DenseTensor::max_norm() const {
    double m = 0.0;
    for (const Scalar& z : entries_) m = std::max(m, std::abs(z));
    return m;
}

double DenseTensor::frobenius_norm() const {
    double s = 0.0;
    for (const Scalar& z : entries_) s += std::norm(z);
    return std::sqrt(s);
}

bool DenseTensor::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Scalar& z) { return z == Scalar{}; });
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    if (other.dims_ != dims_) throw std::invalid_argument("dimension mismatch in sum");
    for (std::size_t n = 0; n < entries_.size(); ++n) entries_[n] += other.entries_[n];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
    if (other.dims_ != dims_) throw std::invalid_argument("dimension mismatch in difference");
    for (std::size_t n = 0; n < entries_.size(); ++n) entries_[n] -= other.entries_[n];
    return *this;
}

DenseTensor& DenseTensor::operator*=(Scalar s) {
    for (Scalar& z : entries_) z *= s;
    return *this;
}

DenseTensor outer_product(const CVector& a, const CVector& b, const CVector& c) {
    const Dims d{static_cast<int>(a.size()), static_cast<int>(b.size()), static_cast<int>(c.size())};
    DenseTensor t(d);
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) t(i, j, k) = a(i) * b(j) * c(k);
    return t;
}

SimpleTerm make_simple_term(CVector a, CVector b, CVector c) {
    if (a.isZero(0.0) || b.isZero(0.0) || c.isZero(0.0)) {
        throw std::invalid_argument("simple term with a zero factor");
    }
    return SimpleTerm{std::move(a), std::move(b), std::move(c)};
}

DenseTensor to_tensor(const SimpleTerm& term) { return outer_product(term.a, term.b, term.c); }

CMatrix slice(const DenseTensor& t, Direction direction, int index) {
    const Dims d = t.dims();
    const int dir = static_cast<int>(direction);
    if (index < 0 || index >= d[dir]) {
        throw std::out_of_range(fmt::format("slice index {} outside 1..{}", index + 1, d[dir]));
    }
    switch (direction) {
    case Direction::horizontal: {
        CMatrix m(d.q, d.r);
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) m(j, k) = t(index, j, k);
        return m;
    }
    case Direction::vertical: {
        CMatrix m(d.p, d.r);
        for (int i = 0; i < d.p; ++i)
            for (int k = 0; k < d.r; ++k) m(i, k) = t(i, index, k);
        return m;
    }
    case Direction::frontal:
    default: {
        CMatrix m(d.p, d.q);
        for (int i = 0; i < d.p; ++i)
            for (int j = 0; j < d.q; ++j) m(i, j) = t(i, j, index);
        return m;
    }
    }
}

DenseTensor apply_basis_change(const DenseTensor& t, const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    const Dims d = t.dims();
    require_square(a, d.p, "A");
    require_square(b, d.q, "B");
    require_square(c, d.r, "C");
    // Three successive mode products; each touches one index.
    DenseTensor s1(d), s2(d), s3(d);
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) {
                Scalar acc{};
                for (int i2 = 0; i2 < d.p; ++i2) acc += a(i, i2) * t(i2, j, k);
                s1(i, j, k) = acc;
            }
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) {
                Scalar acc{};
                for (int j2 = 0; j2 < d.q; ++j2) acc += b(j, j2) * s1(i, j2, k);
                s2(i, j, k) = acc;
            }
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int k = 0; k < d.r; ++k) {
                Scalar acc{};
                for (int k2 = 0; k2 < d.r; ++k2) acc += c(k, k2) * s2(i, j, k2);
                s3(i, j, k) = acc;
            }
    return s3;
}

DenseTensor act(const DenseTensor& t, const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    const Dims d = t.dims();
    require_square(a, d.p, "A");
    require_square(b, d.q, "B");
    require_square(c, d.r, "C");
    for (const auto* m : {&a, &b, &c}) {
        Eigen::FullPivLU<CMatrix> lu(*m);
        if (!lu.isInvertible()) throw std::invalid_argument("change-of-basis matrix is singular");
    }
    return apply_basis_change(t, a, b, c);
}

DenseTensor permute_directions(const DenseTensor& t, const DirectionPerm& perm) {
    require_perm(perm);
    const Dims d = t.dims();
    const Dims nd{d[perm[0]], d[perm[1]], d[perm[2]]};
    DenseTensor out(nd);
    std::array<int, 3> idx{};
    for (idx[0] = 0; idx[0] < d.p; ++idx[0])
        for (idx[1] = 0; idx[1] < d.q; ++idx[1])
            for (idx[2] = 0; idx[2] < d.r; ++idx[2]) {
                out(idx[perm[0]], idx[perm[1]], idx[perm[2]]) = t(idx[0], idx[1], idx[2]);
            }
    return out;
}

SimpleTerm transform(const SimpleTerm& term, const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    return SimpleTerm{a * term.a, b * term.b, c * term.c};
}

SimpleTerm permute_directions(const SimpleTerm& term, const DirectionPerm& perm) {
    require_perm(perm);
    const std::array<const CVector*, 3> f{&term.a, &term.b, &term.c};
    return SimpleTerm{*f[perm[0]], *f[perm[1]], *f[perm[2]]};
}

DenseTensor evaluate(const Decomposition& d) {
    DenseTensor out(d.dims);
    for (const SimpleTerm& term : d.terms) {
        if (term.a.size() != d.dims.p || term.b.size() != d.dims.q || term.c.size() != d.dims.r) {
            throw std::invalid_argument("term factor lengths do not match the array dimensions");
        }
        out += to_tensor(term);
    }
    return out;
}

bool approx_equal(const DenseTensor& a, const DenseTensor& b, double tol) {
    if (a.dims() != b.dims()) return false;
    const double scale = std::max(a.max_norm(), b.max_norm());
    return (a - b).max_norm() <= tol * scale;
}

} // namespace tensorlab
