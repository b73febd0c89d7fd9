#include <algorithm>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "decompose_detail.hpp"

namespace tensorlab {

double verify(const DenseTensor& t, const Decomposition& d) {
    if (t.dims() != d.dims) throw std::invalid_argument("decomposition and array dimensions differ");
    const double err = (t - evaluate(d)).max_norm();
    const double scale = t.max_norm();
    return scale == 0.0 ? err : err / scale;
}

} // namespace tensorlab

namespace tensorlab::detail {

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

void push_term(Decomposition& d, const CVector& a, const CVector& b, const CVector& c) {
    if (a.isZero(0.0) || b.isZero(0.0) || c.isZero(0.0)) return;
    d.terms.push_back(SimpleTerm{a, b, c});
}

void append(Decomposition& d, const Decomposition& more) {
    for (const SimpleTerm& term : more.terms) push_term(d, term.a, term.b, term.c);
}

Decomposition map_terms(const Decomposition& d, const CMatrix& p, const CMatrix& q, const CMatrix& r) {
    Decomposition out;
    out.dims = d.dims;
    for (const SimpleTerm& term : d.terms) {
        const SimpleTerm m = transform(term, p, q, r);
        push_term(out, m.a, m.b, m.c);
    }
    return out;
}

Decomposition via_perm(const DenseTensor& t, const DirectionPerm& perm,
                       const std::function<Decomposition(const DenseTensor&)>& fn) {
    const Decomposition inner = fn(permute_directions(t, perm));
    const DirectionPerm back = inverse(perm);
    Decomposition out;
    out.dims = t.dims();
    for (const SimpleTerm& term : inner.terms) out.terms.push_back(permute_directions(term, back));
    return out;
}

Decomposition via_basis(const DenseTensor& t, const CMatrix& p, const CMatrix& q, const CMatrix& r,
                        const std::function<Decomposition(const DenseTensor&)>& fn) {
    const DenseTensor inner = apply_basis_change(t, p.inverse(), q.inverse(), r.inverse());
    Decomposition out = map_terms(fn(inner), p, q, r);
    out.dims = t.dims();
    return out;
}

void finish(Decomposition& d, const DenseTensor& target) {
    d.dims = target.dims();
    const double floor = 1e-15 * target.max_norm();
    std::erase_if(d.terms, [&](const SimpleTerm& term) {
        return term.a.cwiseAbs().maxCoeff() * term.b.cwiseAbs().maxCoeff() * term.c.cwiseAbs().maxCoeff() <= floor;
    });
    d.residual = verify(target, d);
}

double tensor_norm(const DenseTensor& t) { return t.frobenius_norm(); }

DenseTensor drop_frontal(const DenseTensor& t, int k) {
    const Dims d = t.dims();
    DenseTensor out(Dims{d.p, d.q, d.r - 1});
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j)
            for (int kk = 0, n = 0; kk < d.r; ++kk) {
                if (kk == k) continue;
                out(i, j, n++) = t(i, j, kk);
            }
    return out;
}

Decomposition insert_frontal(const Decomposition& d, int k) {
    Decomposition out;
    out.dims = Dims{d.dims.p, d.dims.q, d.dims.r + 1};
    for (const SimpleTerm& term : d.terms) {
        CVector c = CVector::Zero(d.dims.r + 1);
        for (int kk = 0, n = 0; kk <= d.dims.r; ++kk) {
            if (kk == k) continue;
            c(kk) = term.c(n++);
        }
        push_term(out, term.a, term.b, c);
    }
    return out;
}

Decomposition slice_split(const DenseTensor& t, const Tolerance& tol, double reference) {
    Decomposition out;
    out.dims = t.dims();
    for (int k = 0; k < t.dims().r; ++k) {
        const CMatrix s = t.frontal(k);
        const int r = numerical_rank(s, tol.rank_tol, reference);
        if (r == 0) continue;
        const Eigen::JacobiSVD<CMatrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const CVector c = CVector::Unit(t.dims().r, k);
        for (int n = 0; n < r; ++n) {
            push_term(out, svd.singularValues()(n) * svd.matrixU().col(n), svd.matrixV().col(n).conjugate(), c);
        }
    }
    return out;
}

Decomposition decompose_with_zero_slice(const DenseTensor& t, Direction dir, int index, const Tolerance& tol) {
    const int d = static_cast<int>(dir);
    DirectionPerm perm{};
    for (int m = 0, n = 0; m < 3; ++m)
        if (m != d) perm[n++] = m;
    perm[2] = d;
    return via_perm(t, perm, [&](const DenseTensor& u) {
        Decomposition inner = decompose_332(drop_frontal(u, index), tol);
        return insert_frontal(inner, index);
    });
}

} // namespace tensorlab::detail
