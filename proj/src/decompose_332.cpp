#include <array>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>
#include <fmt/format.h>

#include "decompose_detail.hpp"
#include "tensorlab/errors.hpp"

namespace tensorlab {

using detail::push_term;

namespace {

CVector vec3(Scalar x, Scalar y, Scalar z) { return Eigen::Vector3cd(x, y, z); }
CVector vec2(Scalar x, Scalar y) { return Eigen::Vector2cd(x, y); }

/// Terms of [I | J] for a Jordan form J.
Decomposition canonical_terms(const JordanForm& jf) {
    Decomposition d;
    d.dims = Dims{3, 3, 2};
    const CMatrix& j = jf.j;
    const auto e = [](int n) { return CVector(CVector::Unit(3, n)); };
    switch (jf.shape) {
    case JordanShape::diagonal:
        for (int n = 0; n < 3; ++n) push_term(d, e(n), e(n), vec2(1.0, j(n, n)));
        break;
    case JordanShape::block21:
        for (int n = 0; n < 3; ++n) push_term(d, e(n), e(n), vec2(1.0, j(n, n)));
        push_term(d, e(0), e(1), vec2(0.0, 1.0));
        break;
    case JordanShape::block3: {
        // Subtracting d1 times the first slice leaves [I | shift], which has
        // the explicit four-term form below; R^-1 = [[1, 0], [d1, 1]] maps
        // the third factors back.
        const Scalar d1 = j(0, 0);
        CMatrix rinv(2, 2);
        rinv << 1.0, 0.0, d1, 1.0;
        push_term(d, vec3(1.0, 0.5, 0.0), vec3(0.0, 1.0, 0.0), rinv * vec2(1.0, 1.0));
        push_term(d, vec3(0.0, 1.0, 0.0), vec3(0.0, -0.5, 1.0), rinv * vec2(-1.0, 1.0));
        push_term(d, vec3(1.0, 0.0, 0.0), vec3(1.0, -1.0, 0.0), rinv * vec2(1.0, 0.0));
        push_term(d, vec3(0.0, 1.0, 1.0), vec3(0.0, 0.0, 1.0), rinv * vec2(1.0, 0.0));
        break;
    }
    }
    return d;
}

/// [P | O] = (P E, E^-t, I) . [I | J] with J the Jordan form of P^-1 O.
Decomposition jordan_route(const DenseTensor& x, int pivot, const Tolerance& tol) {
    const CMatrix p = x.frontal(pivot), o = x.frontal(1 - pivot);
    const JordanForm jf = jordan_3x3(p.partialPivLu().solve(o), tol);
    Decomposition inner = canonical_terms(jf);
    if (pivot == 1)
        for (SimpleTerm& term : inner.terms) std::swap(term.c(0), term.c(1));
    Decomposition d = detail::map_terms(inner, p * jf.e, jf.e.transpose().inverse(), detail::identity(2));
    d.dims = x.dims();
    return d;
}

} // namespace

Decomposition decompose_332(const DenseTensor& x, const Tolerance& tol) {
    if (x.dims() != Dims{3, 3, 2}) throw std::invalid_argument("decompose_332 needs a 3x3x2 array");
    Decomposition d;
    d.dims = x.dims();
    if (x.is_zero()) return d;
    const double norm = detail::tensor_norm(x);
    const CMatrix a = x.frontal(0), b = x.frontal(1);
    const int ra = numerical_rank(a, tol.rank_tol, norm), rb = numerical_rank(b, tol.rank_tol, norm);
    if (ra + rb <= 4) {
        d = detail::slice_split(x, tol, norm);
        detail::finish(d, x);
        if (d.residual > tol.residual_tol) {
            throw DecompositionFailure("3x3x2 slice split", fmt::format("residual {:.3e} above tolerance", d.residual));
        }
        return d;
    }

    // Invert the better-conditioned full-rank slice first, then the other.
    std::vector<int> pivots;
    if (ra == 3 && rb == 3) {
        pivots = condition_number(a) <= condition_number(b) ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
    } else {
        pivots = {ra == 3 ? 0 : 1};
    }
    // Near-defective matrices sit on the clustering boundary; looser radii
    // merge eigenvalues the solver has split apart.
    std::vector<double> radii{tol.eig_cluster_tol};
    for (double r : {1e-4, 1e-3, 1e-2})
        if (r > tol.eig_cluster_tol) radii.push_back(r);

    Decomposition best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int pivot : pivots)
        for (double radius : radii) {
            Tolerance t = tol;
            t.eig_cluster_tol = radius;
            Decomposition cand = jordan_route(x, pivot, t);
            detail::finish(cand, x);
            if (cand.residual <= tol.residual_tol && cand.size() <= 4) return cand;
            if (cand.residual < best.residual) best = cand;
        }
    throw DecompositionFailure("3x3x2 Jordan",
                               fmt::format("best residual {:.3e} above tolerance", best.residual));
}

} // namespace tensorlab
