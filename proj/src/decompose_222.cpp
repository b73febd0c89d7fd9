#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "decompose_detail.hpp"
#include "tensorlab/errors.hpp"

namespace tensorlab {

using detail::push_term;

namespace {

void require_dims(const DenseTensor& x, Dims d, const char* who) {
    if (x.dims() != d) {
        throw std::invalid_argument(fmt::format("{} needs a {}x{}x{} array, got {}x{}x{}", who, d.p, d.q, d.r,
                                                x.dims().p, x.dims().q, x.dims().r));
    }
}

constexpr Dims dims222{2, 2, 2};

// Antipodal entry pairs, 0-based (i, j, k).
constexpr std::array<std::array<std::array<int, 3>, 2>, 4> superdiagonal_pairs{{
    {{{0, 0, 0}, {1, 1, 1}}},
    {{{0, 1, 0}, {1, 0, 1}}},
    {{{1, 0, 0}, {0, 1, 1}}},
    {{{1, 1, 0}, {0, 0, 1}}},
}};

enum class Kind { zero, superdiagonal, rank_one, proportional, distinct_roots, three_terms };

/// How a 2x2x2 array will be decomposed. `perm` and `swap` bring the chosen
/// nonsingular slice to the front.
struct Plan {
    Kind kind = Kind::zero;
    int rank = 0;
    DirectionPerm perm = identity_perm;
    bool swap = false;
    DenseTensor front{dims222};
};

DenseTensor swap_frontal(const DenseTensor& x) {
    DenseTensor out(x.dims());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            out(i, j, 0) = x(i, j, 1);
            out(i, j, 1) = x(i, j, 0);
        }
    return out;
}

Plan make_plan(const DenseTensor& x, const Tolerance& tol) {
    Plan plan;
    if (x.is_zero()) return plan;
    if (is_superdiagonal(x, tol)) {
        plan.kind = Kind::superdiagonal;
        plan.rank = 2;
        return plan;
    }
    const double norm = detail::tensor_norm(x);
    double best = -1.0;
    int best_dir = -1, best_index = 0;
    for (int dir = 0; dir < 3; ++dir)
        for (int s = 0; s < 2; ++s) {
            const CMatrix m = slice(x, static_cast<Direction>(dir), s);
            if (numerical_rank(m, tol.rank_tol, norm) < 2) continue;
            const Eigen::Vector2d sv = Eigen::JacobiSVD<CMatrix>(m).singularValues();
            if (sv(1) > best) {
                best = sv(1);
                best_dir = dir;
                best_index = s;
            }
        }
    if (best_dir < 0) {
        plan.kind = Kind::rank_one;
        plan.rank = 1;
        return plan;
    }
    DirectionPerm perm{};
    for (int m = 0, n = 0; m < 3; ++m)
        if (m != best_dir) perm[n++] = m;
    perm[2] = best_dir;
    plan.perm = perm;
    plan.swap = best_index == 1;
    plan.front = permute_directions(x, perm);
    if (plan.swap) plan.front = swap_frontal(plan.front);

    const CMatrix x1 = plan.front.frontal(0), x2 = plan.front.frontal(1);
    const Scalar mu = (x1.adjoint() * x2).trace() / x1.squaredNorm();
    plan.rank = 2;
    if ((x2 - mu * x1).norm() <= tol.rank_tol * x2.norm()) {
        plan.kind = Kind::proportional;
    } else if (std::abs(hyperdeterminant(plan.front)) > tol.rank_tol * std::pow(norm, 4)) {
        plan.kind = Kind::distinct_roots;
    } else {
        plan.kind = Kind::three_terms;
        plan.rank = 3;
    }
    return plan;
}

Decomposition rank_one_term(const DenseTensor& x) {
    int bi = 0, bj = 0, bk = 0;
    double top = -1.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                if (std::abs(x(i, j, k)) > top) {
                    top = std::abs(x(i, j, k));
                    bi = i, bj = j, bk = k;
                }
    const Scalar pivot = x(bi, bj, bk);
    CVector a(2), b(2), c(2);
    for (int n = 0; n < 2; ++n) {
        a(n) = x(n, bj, bk);
        b(n) = x(bi, n, bk) / pivot;
        c(n) = x(bi, bj, n) / pivot;
    }
    Decomposition d;
    d.dims = dims222;
    push_term(d, a, b, c);
    return d;
}

/// Two terms u_i ⊗ v_i ⊗ (1, lambda_i) from the roots of det(X2 - lambda X1).
Decomposition root_terms(const CMatrix& x1, const CMatrix& x2) {
    const Eigen::Vector2cd lambda = Eigen::ComplexEigenSolver<CMatrix>(x1.inverse() * x2, false).eigenvalues();
    const Scalar l1 = lambda(0), l2 = lambda(1);
    const CMatrix m1 = (x2 - l2 * x1) / (l1 - l2);
    const CMatrix m2 = -(x2 - l1 * x1) / (l1 - l2);
    Decomposition d;
    d.dims = dims222;
    CVector u, v;
    rank_one_factors(m1, u, v);
    push_term(d, u, v, Eigen::Vector2cd(1.0, l1));
    rank_one_factors(m2, u, v);
    push_term(d, u, v, Eigen::Vector2cd(1.0, l2));
    return d;
}

/// Three terms from A, B, D, E built on Y2 = X2 X1^-1.
Decomposition three_terms(const CMatrix& x1, const CMatrix& x2, const Tolerance& tol) {
    const double cond = condition_number(x1);
    if (!(cond <= 1.0 / tol.rank_tol)) throw IllConditioned("first frontal slice is too close to singular", cond);
    const CMatrix y = x2 * x1.inverse();
    CMatrix a(2, 3), pattern(2, 3);
    a << 1.0, 0.0, y(0, 1), 0.0, 1.0, y(1, 0);
    pattern << 1.0, 0.0, 1.0, 0.0, 1.0, 1.0;
    const CMatrix b = x1.transpose() * pattern;
    const std::array<Scalar, 3> dd{1.0, 1.0, 0.0};
    const std::array<Scalar, 3> ee{y(0, 0) - y(0, 1), y(1, 1) - y(1, 0), 1.0};
    Decomposition d;
    d.dims = dims222;
    for (int n = 0; n < 3; ++n) push_term(d, a.col(n), b.col(n), Eigen::Vector2cd(dd[n], ee[n]));
    return d;
}

Decomposition proportional_terms(const CMatrix& x1, const CMatrix& x2) {
    const Scalar mu = (x1.adjoint() * x2).trace() / x1.squaredNorm();
    const Eigen::JacobiSVD<CMatrix> svd(x1, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Decomposition d;
    d.dims = dims222;
    for (int n = 0; n < 2; ++n) {
        push_term(d, svd.singularValues()(n) * svd.matrixU().col(n), svd.matrixV().col(n).conjugate(),
                  Eigen::Vector2cd(1.0, mu));
    }
    return d;
}

/// Undoes the slice swap and direction permutation of a plan.
Decomposition unplan(const Plan& plan, Decomposition d) {
    if (plan.swap)
        for (SimpleTerm& term : d.terms) std::swap(term.c(0), term.c(1));
    Decomposition out;
    out.dims = dims222;
    const DirectionPerm back = inverse(plan.perm);
    for (const SimpleTerm& term : d.terms) out.terms.push_back(permute_directions(term, back));
    return out;
}

} // namespace

Scalar hyperdeterminant(const DenseTensor& x) {
    require_dims(x, dims222, "hyperdeterminant");
    const auto e = [&](int i, int j, int k) { return x(i - 1, j - 1, k - 1); };
    const Scalar x111 = e(1, 1, 1), x112 = e(1, 1, 2), x121 = e(1, 2, 1), x122 = e(1, 2, 2);
    const Scalar x211 = e(2, 1, 1), x212 = e(2, 1, 2), x221 = e(2, 2, 1), x222 = e(2, 2, 2);
    return x111 * x111 * x222 * x222 + x112 * x112 * x221 * x221 + x121 * x121 * x212 * x212 +
           x122 * x122 * x211 * x211 -
           2.0 * (x111 * x112 * x221 * x222 + x111 * x121 * x212 * x222 + x111 * x122 * x211 * x222 +
                  x112 * x121 * x212 * x221 + x112 * x122 * x211 * x221 + x121 * x122 * x211 * x212) +
           4.0 * (x111 * x122 * x212 * x221 + x112 * x121 * x211 * x222);
}

bool is_superdiagonal(const DenseTensor& x, const Tolerance& tol) {
    require_dims(x, dims222, "is_superdiagonal");
    const double top = x.max_norm();
    if (top == 0.0) return false;
    const double cutoff = tol.rank_tol * top;
    for (const auto& pair : superdiagonal_pairs) {
        bool match = true;
        for (int i = 0; i < 2 && match; ++i)
            for (int j = 0; j < 2 && match; ++j)
                for (int k = 0; k < 2 && match; ++k) {
                    const bool on = (std::array{i, j, k} == pair[0]) || (std::array{i, j, k} == pair[1]);
                    const double v = std::abs(x(i, j, k));
                    match = on ? v > cutoff : v <= cutoff;
                }
        if (match) return true;
    }
    return false;
}

int rank_222(const DenseTensor& x, const Tolerance& tol) {
    require_dims(x, dims222, "rank_222");
    return make_plan(x, tol).rank;
}

Decomposition decompose_222(const DenseTensor& x, const Tolerance& tol) {
    require_dims(x, dims222, "decompose_222");
    const Plan plan = make_plan(x, tol);
    Decomposition d;
    d.dims = dims222;
    switch (plan.kind) {
    case Kind::zero:
        break;
    case Kind::superdiagonal:
        for (const auto& pair : superdiagonal_pairs)
            for (const auto& [i, j, k] : pair) {
                if (std::abs(x(i, j, k)) <= tol.rank_tol * x.max_norm()) continue;
                push_term(d, x(i, j, k) * CVector::Unit(2, i), CVector::Unit(2, j), CVector::Unit(2, k));
            }
        break;
    case Kind::rank_one:
        d = rank_one_term(x);
        break;
    case Kind::proportional:
        d = unplan(plan, proportional_terms(plan.front.frontal(0), plan.front.frontal(1)));
        break;
    case Kind::distinct_roots:
        d = unplan(plan, root_terms(plan.front.frontal(0), plan.front.frontal(1)));
        break;
    case Kind::three_terms:
        d = unplan(plan, three_terms(plan.front.frontal(0), plan.front.frontal(1), tol));
        break;
    }
    detail::finish(d, x);
    if (d.residual > tol.residual_tol && plan.kind == Kind::distinct_roots) {
        // Nearly equal roots make the two-term form unstable; the three-term
        // form only needs X1 inverted.
        d = unplan(plan, three_terms(plan.front.frontal(0), plan.front.frontal(1), tol));
        detail::finish(d, x);
    }
    if (d.residual > tol.residual_tol) {
        throw DecompositionFailure("2x2x2", fmt::format("residual {:.3e} above tolerance", d.residual));
    }
    return d;
}

Decomposition decompose_223(const DenseTensor& x, const Tolerance& tol) {
    require_dims(x, Dims{2, 2, 3}, "decompose_223");
    Decomposition d;
    d.dims = x.dims();
    if (x.is_zero()) return d;
    const double norm = detail::tensor_norm(x);
    // Columns are the vectorized frontal slices.
    CMatrix s(4, 3);
    for (int k = 0; k < 3; ++k) {
        const CMatrix f = x.frontal(k);
        s.col(k) << f(0, 0), f(0, 1), f(1, 0), f(1, 1);
    }
    const Eigen::JacobiSVD<CMatrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto unvec = [](const CVector& v) {
        CMatrix m(2, 2);
        m << v(0), v(1), v(2), v(3);
        return m;
    };
    if (svd.singularValues()(2) <= tol.rank_tol * norm) {
        // The slices span at most two dimensions: S_k = sum_m N_m conj(V)_km.
        const CMatrix us = svd.matrixU().leftCols(2) * svd.singularValues().head(2).asDiagonal();
        const CMatrix vbar = svd.matrixV().leftCols(2).conjugate();
        const std::array<CMatrix, 2> slices{unvec(us.col(0)), unvec(us.col(1))};
        const Decomposition inner = decompose_222(DenseTensor::from_frontal(slices), tol);
        for (const SimpleTerm& term : inner.terms) push_term(d, term.a, term.b, vbar * term.c);
        detail::finish(d, x);
        if (d.residual > tol.residual_tol) {
            throw DecompositionFailure("2x2x3", fmt::format("residual {:.3e} above tolerance", d.residual));
        }
        return d;
    }
    // Three independent slices. Rank-one members of their span are the zeros
    // of the quadratic form q(w) = det(sum w_k S_k).
    std::array<CMatrix, 3> sl{x.frontal(0), x.frontal(1), x.frontal(2)};
    const auto bilinear = [](const CMatrix& p, const CMatrix& r) {
        return 0.5 * (p(0, 0) * r(1, 1) + r(0, 0) * p(1, 1) - p(0, 1) * r(1, 0) - r(0, 1) * p(1, 0));
    };
    Eigen::Matrix3cd q;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) q(k, l) = bilinear(sl[k], sl[l]);
    const auto form = [&](const Eigen::Vector3cd& u, const Eigen::Vector3cd& v) { return (u.transpose() * q * v)(0); };

    std::vector<Eigen::Vector3cd> points;
    const std::array<Eigen::Vector3cd, 6> starts{
        Eigen::Vector3cd(1, 0, 0), Eigen::Vector3cd(0, 1, 0), Eigen::Vector3cd(0, 0, 1),
        Eigen::Vector3cd(1, 1, 1), Eigen::Vector3cd(1, -1, 0), Eigen::Vector3cd(Scalar(0.3, 0.7), 1, Scalar(-0.6, 0.2))};
    const std::array<Eigen::Vector3cd, 6> dirs{
        Eigen::Vector3cd(0, 1, 0), Eigen::Vector3cd(0, 0, 1), Eigen::Vector3cd(1, 0, 0),
        Eigen::Vector3cd(1, -2, 3), Eigen::Vector3cd(Scalar(0.5, 1), 0.25, 1), Eigen::Vector3cd(1, Scalar(0.2, -0.9), 0.4)};
    // Each line w0 + t w1 meets the conic where q0 + 2 t b + t^2 q1 = 0.
    for (std::size_t n = 0; n < starts.size(); ++n) {
        const Eigen::Vector3cd w0 = starts[n], w1 = dirs[n];
        const Scalar q0 = form(w0, w0), b = form(w0, w1), q1 = form(w1, w1);
        const double scale = std::abs(q0) + std::abs(b) + std::abs(q1);
        if (scale == 0.0) continue;
        if (std::abs(q1) <= 1e-12 * scale) {
            if (std::abs(b) > 1e-12 * scale) points.push_back((w0 - q0 / (2.0 * b) * w1).normalized());
            points.push_back(w1.normalized());
            continue;
        }
        const Scalar root = std::sqrt(b * b - q0 * q1);
        for (const Scalar t : {(-b + root) / q1, (-b - root) / q1}) points.push_back((w0 + t * w1).normalized());
        if (std::abs(q0) <= 1e-12 * scale) points.push_back(w0.normalized());
    }
    // Choose the best-conditioned independent triple.
    double best = 0.0;
    Eigen::Matrix3cd wm;
    for (std::size_t a = 0; a < points.size(); ++a)
        for (std::size_t b = a + 1; b < points.size(); ++b)
            for (std::size_t c = b + 1; c < points.size(); ++c) {
                Eigen::Matrix3cd cand;
                cand << points[a], points[b], points[c];
                const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3cd>(cand).singularValues();
                if (sv(2) / sv(0) > best) {
                    best = sv(2) / sv(0);
                    wm = cand;
                }
            }
    if (best <= 0.0) throw DecompositionFailure("2x2x3", "no independent rank-one slice combinations");
    // e_k = sum_m (W^-1)_mk w_m, so slice k has coefficient (W^-1)_mk on R_m.
    const Eigen::Matrix3cd winv = wm.inverse();
    for (int m = 0; m < 3; ++m) {
        CMatrix r = CMatrix::Zero(2, 2);
        for (int k = 0; k < 3; ++k) r += wm(k, m) * sl[k];
        CVector u, v;
        rank_one_factors(r, u, v);
        push_term(d, u, v, winv.row(m).transpose());
    }
    detail::finish(d, x);
    if (d.residual > tol.residual_tol) {
        throw DecompositionFailure("2x2x3", fmt::format("residual {:.3e} above tolerance", d.residual));
    }
    return d;
}

} // namespace tensorlab
