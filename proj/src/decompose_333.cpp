#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "decompose_detail.hpp"
#include "tensorlab/errors.hpp"

namespace tensorlab {

using detail::push_term;
using detail::via_basis;

namespace {

constexpr Dims dims333{3, 3, 3};

using Svd = Eigen::JacobiSVD<CMatrix>;

CMatrix id3() { return CMatrix::Identity(3, 3); }

std::array<CMatrix, 3> frontal_slices(const DenseTensor& t) { return {t.frontal(0), t.frontal(1), t.frontal(2)}; }

/// Columns: the given vectors followed by an orthonormal complement.
CMatrix complete_basis(const CMatrix& given) {
    const Svd svd(given, Eigen::ComputeFullU);
    CMatrix out(3, 3);
    out << given, svd.matrixU().rightCols(3 - given.cols());
    return out;
}

/// [x | e_j | e_k], dropping the standard vector where x is largest.
CMatrix greedy_basis(const CVector& x) {
    Eigen::Index top = 0;
    x.cwiseAbs().maxCoeff(&top);
    CMatrix out(3, 3);
    out.col(0) = x;
    for (int n = 0, c = 1; n < 3; ++n)
        if (n != top) out.col(c++) = CVector::Unit(3, n);
    return out;
}

/// Permutation matrix P with (I, I, P^-1) . T having frontal slice m equal
/// to slice order[m] of T.
CMatrix slice_order_matrix(const std::array<int, 3>& order) {
    CMatrix pinv = CMatrix::Zero(3, 3);
    for (int m = 0; m < 3; ++m) pinv(m, order[m]) = 1.0;
    return pinv.transpose();
}

std::array<int, 3> order_with_front(int first, int second) {
    std::array<int, 3> order{first, second, 3 - first - second};
    return order;
}

double sigma_ratio(const CMatrix& m) {
    const Eigen::VectorXd s = Svd(m).singularValues();
    return s(0) == 0.0 ? 0.0 : s(s.size() - 1) / s(0);
}

/// Unit vectors with one column a multiple of the other.
bool dependent(const CVector& u, const CVector& v, double cutoff) {
    CMatrix m(3, 2);
    m << u.normalized(), v.normalized();
    return Svd(m).singularValues()(1) <= cutoff;
}

/// Runs the full decision tree on one array; all rank decisions are made
/// against the norm of the array at hand.
class Solver {
public:
    explicit Solver(Tolerance tol) : tol_(tol) {}

    Decomposition solve(const DenseTensor& t) {
        Decomposition d;
        d.dims = dims333;
        if (t.is_zero()) return d;
        const double norm = detail::tensor_norm(t);
        const auto s = frontal_slices(t);
        for (int k = 0; k < 3; ++k)
            if (numerical_rank(s[k], tol_.rank_tol, norm) == 0)
                return detail::decompose_with_zero_slice(t, Direction::frontal, k, tol_);
        return singularize(t);
    }

    Decomposition case1(const DenseTensor& t, bool transposed);
    Decomposition case2(const DenseTensor& t, bool transposed, int depth);
    Decomposition ranked(const DenseTensor& t, int depth);

private:
    Decomposition singularize(const DenseTensor& t);
    Decomposition with_order(const DenseTensor& t, const std::array<int, 3>& order,
                             const std::function<Decomposition(const DenseTensor&)>& fn) {
        return via_basis(t, id3(), id3(), slice_order_matrix(order), fn);
    }
    std::optional<Decomposition> try_two_edge(const DenseTensor& t, const std::array<CVector, 3>& x,
                                              const std::array<CVector, 3>& y, const std::vector<int>& singular);
    double edge_cutoff() const { return 10.0 * tol_.rank_tol; }
    [[noreturn]] void contradiction(const std::string& label, const std::string& detail) const {
        throw DecompositionFailure(label, detail);
    }

    Tolerance tol_;
};

/// Makes the first two frontal slices singular by pencils against the other
/// slices, then hands over to the slice-rank stage.
Decomposition Solver::singularize(const DenseTensor& t) {
    const double norm = detail::tensor_norm(t);
    auto s = frontal_slices(t);
    std::array<bool, 3> singular{};
    for (int k = 0; k < 3; ++k) singular[k] = numerical_rank(s[k], tol_.rank_tol, norm) <= 2;

    // rstep accumulates the change of basis along the third direction:
    // current = (I, I, rstep) . t.
    CMatrix rstep = id3();
    for (int target = 0; target < 3 && std::count(singular.begin(), singular.end(), true) < 2; ++target) {
        if (singular[target]) continue;
        // Candidate pencil partners: single slices, then combinations of two,
        // so that a pencil with constant determinant can be sidestepped.
        std::vector<CVector> partners;
        const int u = (target + 1) % 3, v = (target + 2) % 3;
        for (const auto& coeff : std::vector<std::pair<Scalar, Scalar>>{
                 {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}, {1.0, 2.0}, {2.0, 1.0}}) {
            CVector w = CVector::Zero(3);
            w(u) = coeff.first;
            w(v) = coeff.second;
            partners.push_back(w);
        }
        bool done = false;
        for (const CVector& w : partners) {
            CMatrix partner = CMatrix::Zero(3, 3);
            for (int k = 0; k < 3; ++k) partner += w(k) * s[k];
            if (partner.norm() <= tol_.rank_tol * norm) continue;
            const PencilRoot root = singularize_slice(s[target], partner, tol_);
            if (root.degenerate || root.sigma_min > 1e-7) continue;
            CMatrix step = id3();
            step.row(target) -= root.lambda * w.transpose();
            s[target] -= root.lambda * partner;
            rstep = step * rstep;
            singular[target] = true;
            done = true;
            break;
        }
        if (!done) contradiction("singularize", fmt::format("no pencil makes slice {} singular", target + 1));
    }
    DenseTensor current = DenseTensor::from_frontal(s);
    // Slices made singular only to about 1e-7 are snapped onto the singular set.
    const double cnorm = detail::tensor_norm(current);
    for (int k = 0; k < 3; ++k) {
        if (!singular[k] || numerical_rank(s[k], tol_.rank_tol, cnorm) <= 2) continue;
        const Svd svd(s[k], Eigen::ComputeFullU | Eigen::ComputeFullV);
        s[k] -= svd.singularValues()(2) * svd.matrixU().col(2) * svd.matrixV().col(2).adjoint();
    }
    current = DenseTensor::from_frontal(s);

    std::array<int, 3> order{};
    int n = 0;
    for (int k = 0; k < 3; ++k)
        if (singular[k] && n < 2) order[n++] = k;
    for (int k = 0; k < 3; ++k)
        if (k != order[0] && k != order[1]) order[2] = k;

    Decomposition inner = with_order(current, order, [&](const DenseTensor& u) { return ranked(u, 0); });
    // current = (I, I, rstep) . t, so t = (I, I, rstep^-1) . current.
    Decomposition d = detail::map_terms(inner, id3(), id3(), rstep.inverse());
    d.dims = dims333;
    return d;
}

/// First two frontal slices have rank at most 2.
Decomposition Solver::ranked(const DenseTensor& t, int depth) {
    const double norm = detail::tensor_norm(t);
    const auto s = frontal_slices(t);
    std::array<int, 3> r{};
    for (int k = 0; k < 3; ++k) r[k] = numerical_rank(s[k], tol_.rank_tol, norm);
    for (int k = 0; k < 3; ++k)
        if (r[k] == 0) return detail::decompose_with_zero_slice(t, Direction::frontal, k, tol_);
    for (int k = 0; k < 3; ++k) {
        if (r[k] != 1) continue;
        Decomposition d;
        d.dims = dims333;
        CVector u, v;
        rank_one_factors(s[k], u, v);
        push_term(d, u, v, CVector::Unit(3, k));
        DenseTensor rest = t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) rest(i, j, k) = 0.0;
        detail::append(d, detail::decompose_with_zero_slice(rest, Direction::frontal, k, tol_));
        return d;
    }
    if (r[0] > 2 || r[1] > 2) contradiction("slice ranks", "leading slices are not singular");
    if (r[2] == 2) return case1(t, false);
    return case2(t, false, depth);
}

std::optional<Decomposition> Solver::try_two_edge(const DenseTensor& t, const std::array<CVector, 3>& x,
                                                  const std::array<CVector, 3>& y, const std::vector<int>& singular) {
    const double norm = detail::tensor_norm(t);
    const auto s = frontal_slices(t);
    double best = 0.0;
    int bd = -1, be = -1;
    for (int dd : singular)
        for (int e = 0; e < 3; ++e) {
            if (e == dd) continue;
            const double val = std::abs((y[dd].transpose() * s[e] * x[dd])(0)) / norm;
            if (val > best) {
                best = val;
                bd = dd;
                be = e;
            }
        }
    if (bd < 0 || best <= edge_cutoff()) return std::nullopt;
    const CVector xd = x[bd], yd = y[bd];
    return with_order(t, order_with_front(bd, be),
                      [&](const DenseTensor& u) { return two_edge_reduce(u, xd, yd, tol_); });
}

Decomposition Solver::case1(const DenseTensor& t, bool transposed) {
    const double norm = detail::tensor_norm(t);
    const auto s = frontal_slices(t);
    std::array<CVector, 3> x, y;
    for (int k = 0; k < 3; ++k) {
        x[k] = right_null_vector(s[k]);
        y[k] = left_null_vector(s[k]);
    }
    if (auto d = try_two_edge(t, x, y, {0, 1, 2})) return *d;

    // Two slices share a right (or left) null vector.
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            if (dependent(x[i], x[j], edge_cutoff()))
                return one_edge_reduce(t, Direction::frontal, i, j, x[i], NullSide::right, tol_);
            if (dependent(y[i], y[j], edge_cutoff()))
                return one_edge_reduce(t, Direction::frontal, i, j, y[i], NullSide::left, tol_);
        }

    CMatrix xm(3, 3), ym(3, 3);
    xm << x[0], x[1], x[2];
    ym << y[0], y[1], y[2];
    if (sigma_ratio(xm) <= edge_cutoff()) {
        // The first horizontal slice of (V^t, U^t, I) . t has rank 1.
        CMatrix x12(3, 2);
        x12 << x[0], x[1];
        const CMatrix u = complete_basis(x12);
        const CMatrix v = complete_basis(y[0]);
        return via_basis(t, v.transpose().inverse(), u.transpose().inverse(), id3(), [&](const DenseTensor& w) {
            const CMatrix h = slice(w, Direction::horizontal, 0);
            if (numerical_rank(h, edge_cutoff(), norm) > 1) {
                contradiction("rank-2 slice: peel", "first horizontal slice has rank above 1");
            }
            Decomposition d;
            d.dims = dims333;
            DenseTensor rest = w;
            if (!h.isZero(0.0)) {
                CVector hb, hc;
                rank_one_factors(h, hb, hc);
                push_term(d, CVector::Unit(3, 0), hb, hc);
                rest -= outer_product(CVector::Unit(3, 0), hb, hc);
            }
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) rest(0, j, k) = 0.0;
            detail::append(d, detail::decompose_with_zero_slice(rest, Direction::horizontal, 0, tol_));
            return d;
        });
    }

    // Neither: bring the null-vector matrices to a normal form.
    if (sigma_ratio(ym) <= edge_cutoff()) {
        if (transposed) contradiction("rank-2 slice: normal form", "null vector matrices are singular on both sides");
        return detail::via_perm(t, {1, 0, 2}, [&](const DenseTensor& w) { return case1(w, true); });
    }
    CMatrix xs(3, 3);
    xs << x[1], x[0], x[2];
    return via_basis(t, ym.transpose().inverse(), xs.transpose().inverse(), id3(), [&](const DenseTensor& w) {
        // Slices are now A = [[0,0,0],[0,0,b],[a,0,0]], B = [[0,0,d],[0,0,0],[0,g,0]],
        // C = diag(z, e, 0) up to rounding.
        const Scalar alpha = w(2, 0, 0), beta = w(1, 2, 0);
        const Scalar gamma = w(2, 1, 1), delta = w(0, 2, 1);
        const Scalar zeta = w(0, 0, 2), eps = w(1, 1, 2);
        Decomposition d;
        d.dims = dims333;
        const auto e = [](int n) { return CVector(CVector::Unit(3, n)); };
        push_term(d, e(2), Eigen::Vector3cd(alpha, -beta, -beta), e(0));
        push_term(d, Eigen::Vector3cd(delta, -gamma, -gamma), e(2), e(1));
        push_term(d, zeta * e(0), e(0), e(2));
        push_term(d, Eigen::Vector3cd(0, 1, 1), Eigen::Vector3cd(0, 1, 1), Eigen::Vector3cd(beta, gamma, 0));
        push_term(d, e(1), e(1), Eigen::Vector3cd(-beta, -gamma, eps));
        detail::finish(d, w);
        if (d.residual > tol_.residual_tol) {
            contradiction("rank-2 slice: normal form", fmt::format("normal form residual {:.3e}", d.residual));
        }
        return d;
    });
}

Decomposition Solver::case2(const DenseTensor& t, bool transposed, int depth) {
    const double norm = detail::tensor_norm(t);
    const auto s = frontal_slices(t);

    // Look for alpha A + beta B + C singular, scanning one
    // scalar and solving the pencil in the other.
    if (depth < 2) {
        std::optional<std::pair<Scalar, Scalar>> best;
        const auto consider = [&](Scalar a, Scalar b) {
            const CMatrix m = a * s[0] + b * s[1] + s[2];
            if (numerical_rank(m, tol_.rank_tol, norm) > 2) return;
            if (!best || std::abs(a) + std::abs(b) < std::abs(best->first) + std::abs(best->second)) best = {a, b};
        };
        for (const Scalar fixed : {Scalar(0.0), Scalar(1.0), Scalar(-1.0), Scalar(2.0), Scalar(0.0, 1.0)}) {
            if (s[1].norm() > 0.0) {
                const PencilRoot r = singularize_slice(fixed * s[0] + s[2], -s[1], tol_);
                if (!r.degenerate && r.sigma_min <= tol_.rank_tol) consider(fixed, r.lambda);
            }
            if (s[0].norm() > 0.0) {
                const PencilRoot r = singularize_slice(fixed * s[1] + s[2], -s[0], tol_);
                if (!r.degenerate && r.sigma_min <= tol_.rank_tol) consider(r.lambda, fixed);
            }
        }
        if (best) {
            CMatrix step = id3();
            step(2, 0) = best->first;
            step(2, 1) = best->second;
            return via_basis(t, id3(), id3(), step.inverse(), [&](const DenseTensor& w) { return ranked(w, depth + 1); });
        }
    }

    // No singular combination: the null vectors give a Hermitian reduction.
    const CMatrix cinv = s[2].inverse();
    const CVector x1 = right_null_vector(s[0]), x2 = right_null_vector(s[1]);
    const CVector y1 = left_null_vector(s[0]), y2 = left_null_vector(s[1]);
    const CVector x3 = cinv * s[0] * x2;
    const CVector y3 = cinv.transpose() * s[0].transpose() * y2;
    {
        std::array<CVector, 3> xs{x1, x2, x3}, ys{y1, y2, y3};
        if (auto d = try_two_edge(t, xs, ys, {0, 1})) return *d;
    }
    if (dependent(x1, x2, edge_cutoff()))
        return one_edge_reduce(t, Direction::frontal, 0, 1, x1, NullSide::right, tol_);
    if (dependent(y1, y2, edge_cutoff()))
        return one_edge_reduce(t, Direction::frontal, 0, 1, y1, NullSide::left, tol_);

    CMatrix xm(3, 3), ym(3, 3);
    xm << x1, x2, x3;
    ym << y1, y2, y3;
    if (sigma_ratio(xm) <= edge_cutoff()) {
        contradiction("invertible slices: Hermitian step", "null vectors x1, x2, x3 are dependent although no combination of slices is singular");
    }
    if (sigma_ratio(ym) <= edge_cutoff()) {
        if (transposed) contradiction("invertible slices: Hermitian step", "null vectors are dependent on both sides");
        return detail::via_perm(t, {1, 0, 2}, [&](const DenseTensor& w) { return case2(w, true, 2); });
    }
    CMatrix xs(3, 3);
    xs << x2, x1, x3;
    return via_basis(t, ym.transpose().inverse(), xs.transpose().inverse(), id3(), [&](const DenseTensor& w) {
        // A = [[0,0,0],[0,0,g],[g,d,0]], B = [[0,0,z],[0,0,0],[0,e,h]],
        // C = [[l,0,0],[0,k,0],[0,0,g]] after the column swap.
        const double wn = detail::tensor_norm(w);
        const Scalar delta = w(2, 1, 0), eta = w(2, 2, 1);
        if (std::abs(delta) > edge_cutoff() * wn || std::abs(eta) > edge_cutoff() * wn) {
            contradiction("invertible slices: Hermitian step", "delta or eta is nonzero although no combination of slices is singular");
        }
        const Scalar lambda = w(0, 0, 2), kappa = w(1, 1, 2), gamma = w(2, 2, 2);
        if (std::abs(lambda) <= edge_cutoff() * wn || std::abs(kappa) <= edge_cutoff() * wn ||
            std::abs(gamma) <= edge_cutoff() * wn) {
            contradiction("invertible slices: Hermitian step", "third slice lost full rank");
        }
        CMatrix scale = CMatrix::Zero(3, 3);
        scale.diagonal() << 1.0 / lambda, 1.0 / kappa, 1.0 / gamma;
        return via_basis(w, scale.inverse(), id3(), id3(), [&](const DenseTensor& z) {
            const auto e = [](int n) { return CVector(CVector::Unit(3, n)); };
            const Scalar g_over_k = z(1, 2, 0), one = z(2, 0, 0);
            const Scalar e_over_g = z(2, 1, 1), z_over_l = z(0, 2, 1);
            Decomposition d;
            d.dims = dims333;
            const CVector c1 = Eigen::Vector3cd(g_over_k, -std::conj(e_over_g), 0.0);
            const CVector c2 = Eigen::Vector3cd(one, -std::conj(z_over_l), 0.0);
            push_term(d, e(1), e(2), c1);
            push_term(d, e(2), e(0), c2);
            const DenseTensor rest = z - outer_product(e(1), e(2), c1) - outer_product(e(2), e(0), c2);
            // What remains is [0 | H | C] with H Hermitian and C the identity up to rounding.
            const CMatrix h = rest.frontal(1);
            if ((h - h.adjoint()).norm() > 1e-6 * detail::tensor_norm(rest)) {
                contradiction("invertible slices: Hermitian step", "second slice is not Hermitian after the subtraction");
            }
            const Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (h + h.adjoint()));
            const CMatrix ev = eig.eigenvectors();
            for (int n = 0; n < 3; ++n) {
                push_term(d, ev.col(n), ev.col(n).conjugate(), Eigen::Vector3cd(0.0, eig.eigenvalues()(n), 1.0));
            }
            return d;
        });
    });
}

} // namespace

Decomposition one_edge_reduce(const DenseTensor& t, Direction dir, int first, int second, const CVector& x,
                              NullSide side, const Tolerance& tol) {
    if (t.dims() != dims333) throw std::invalid_argument("one_edge_reduce needs a 3x3x3 array");
    if (first == second || first < 0 || first > 2 || second < 0 || second > 2) {
        throw std::invalid_argument("one_edge_reduce needs two distinct slice indices");
    }
    if (x.size() != 3 || x.isZero(0.0)) throw std::invalid_argument("one_edge_reduce needs a nonzero 3-vector");
    Decomposition empty;
    empty.dims = dims333;
    if (t.is_zero()) return empty;

    const int d = static_cast<int>(dir);
    DirectionPerm perm{};
    for (int m = 0, n = 0; m < 3; ++m)
        if (m != d) perm[n++] = m;
    perm[2] = d;
    if (side == NullSide::left) std::swap(perm[0], perm[1]);
    const double norm = detail::tensor_norm(t);
    const CVector xn = x.normalized();

    return detail::via_perm(t, perm, [&](const DenseTensor& u) {
        return detail::via_basis(
            u, id3(), id3(), slice_order_matrix(order_with_front(first, second)), [&](const DenseTensor& w) {
                const CMatrix a = w.frontal(0), b = w.frontal(1);
                if ((a * xn).norm() > tol.residual_tol * norm || (b * xn).norm() > tol.residual_tol * norm) {
                    throw std::invalid_argument("one_edge_reduce: the slices do not annihilate x");
                }
                const CMatrix basis = greedy_basis(xn);
                return via_basis(w, id3(), basis.transpose().inverse(), id3(), [&](const DenseTensor& z) {
                    Decomposition out;
                    out.dims = dims333;
                    CVector cx(3);
                    for (int i = 0; i < 3; ++i) cx(i) = z(i, 0, 2);
                    push_term(out, cx, CVector::Unit(3, 0), CVector::Unit(3, 2));
                    DenseTensor rest = z;
                    for (int i = 0; i < 3; ++i)
                        for (int k = 0; k < 3; ++k) rest(i, 0, k) = 0.0;
                    detail::append(out, detail::decompose_with_zero_slice(rest, Direction::vertical, 0, tol));
                    return out;
                });
            });
    });
}

Decomposition two_edge_reduce(const DenseTensor& t, const CVector& x, const CVector& y, const Tolerance& tol) {
    if (t.dims() != dims333) throw std::invalid_argument("two_edge_reduce needs a 3x3x3 array");
    if (x.size() != 3 || y.size() != 3 || x.isZero(0.0) || y.isZero(0.0)) {
        throw std::invalid_argument("two_edge_reduce needs nonzero 3-vectors");
    }
    const double norm = detail::tensor_norm(t);
    const CVector xn = x.normalized(), yn = y.normalized();
    const CMatrix a = t.frontal(0), b = t.frontal(1);
    if ((a * xn).norm() > tol.residual_tol * norm || (yn.transpose() * a).norm() > tol.residual_tol * norm) {
        throw std::invalid_argument("two_edge_reduce: the first slice does not annihilate x and y");
    }
    const Scalar alpha0 = (yn.transpose() * b * xn)(0);
    if (std::abs(alpha0) <= tol.rank_tol * norm) throw std::invalid_argument("two_edge_reduce: y^t B x vanishes");

    const CMatrix u = complete_basis(xn), v = complete_basis(yn);
    return via_basis(t, v.transpose().inverse(), u.transpose().inverse(), id3(), [&](const DenseTensor& w) {
        const Scalar alpha = w(0, 0, 1);
        const bool add = std::abs(w(0, 0, 2)) < 0.5 * std::abs(alpha);
        CMatrix step = id3();
        if (add) step(2, 1) = 1.0;
        return via_basis(w, id3(), id3(), step.inverse(), [&](const DenseTensor& z) {
            Decomposition out;
            out.dims = dims333;
            DenseTensor rest = z;
            for (int k = 1; k < 3; ++k) {
                const Scalar pivot = z(0, 0, k);
                CVector col(3), row(3);
                for (int n = 0; n < 3; ++n) {
                    col(n) = z(n, 0, k);
                    row(n) = z(0, n, k) / pivot;
                }
                const CVector c = CVector::Unit(3, k);
                push_term(out, col, row, c);
                rest -= outer_product(col, row, c);
            }
            // The remaining content sits in rows 2-3 and columns 2-3 of each slice.
            DenseTensor core(Dims{2, 2, 3});
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 3; ++k) core(i, j, k) = rest(i + 1, j + 1, k);
            for (const SimpleTerm& term : decompose_223(core, tol).terms) {
                CVector a3 = CVector::Zero(3), b3 = CVector::Zero(3);
                a3.tail(2) = term.a;
                b3.tail(2) = term.b;
                push_term(out, a3, b3, term.c);
            }
            return out;
        });
    });
}

Decomposition decompose_333(const DenseTensor& t, const Tolerance& tol) {
    if (t.dims() != dims333) throw std::invalid_argument("decompose_333 needs a 3x3x3 array");
    tol.validate();
    Decomposition empty;
    empty.dims = dims333;
    if (t.is_zero()) return empty;

    // Retries: every direction permutation at the given tolerance, then once
    // more with a perturbed rank tolerance.
    std::vector<Tolerance> tolerances{tol};
    Tolerance loose = tol;
    loose.rank_tol = std::min(tol.rank_tol * 1e3, tol.eig_cluster_tol);
    if (loose.rank_tol != tol.rank_tol) tolerances.push_back(loose);
    std::string label = "3x3x3";
    std::string detail_msg = "no route succeeded";
    double best = std::numeric_limits<double>::infinity();
    for (const Tolerance& attempt : tolerances) {
        DirectionPerm perm = identity_perm;
        do {
            try {
                Solver solver(attempt);
                Decomposition d = detail::via_perm(t, perm, [&](const DenseTensor& u) { return solver.solve(u); });
                detail::finish(d, t);
                if (d.residual <= tol.residual_tol && d.size() <= 5) return d;
                if (d.residual < best) {
                    best = d.residual;
                    label = "3x3x3";
                    detail_msg = fmt::format("{} terms with residual {:.3e}", d.size(), d.residual);
                }
            } catch (const DecompositionFailure& e) {
                label = e.case_label();
                detail_msg = e.what();
            } catch (const IllConditioned& e) {
                label = "inversion";
                detail_msg = e.what();
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    throw DecompositionFailure(label, detail_msg);
}

Decomposition decompose(const DenseTensor& t, const Tolerance& tol) {
    tol.validate();
    const Dims d = t.dims();
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] > d[b]; });
    const Dims sorted{d[order[0]], d[order[1]], d[order[2]]};
    // perm puts the largest extents first.
    const DirectionPerm perm{order[0], order[1], order[2]};
    Dims padded;
    std::function<Decomposition(const DenseTensor&, const Tolerance&)> route;
    if (sorted.p <= 2) {
        padded = {2, 2, 2};
        route = decompose_222;
    } else if (sorted.q <= 2) {
        padded = {2, 2, 3};
        route = decompose_223;
    } else if (sorted.r <= 2) {
        padded = {3, 3, 2};
        route = decompose_332;
    } else {
        padded = dims333;
        route = decompose_333;
    }
    Decomposition out = detail::via_perm(t, perm, [&](const DenseTensor& u) {
        // 2x2x3 is stored with the long direction last.
        const bool long_last = padded == Dims{2, 2, 3};
        const DirectionPerm inner_perm = long_last ? DirectionPerm{1, 2, 0} : identity_perm;
        return detail::via_perm(u, inner_perm, [&](const DenseTensor& v) {
            DenseTensor big(padded);
            const Dims vd = v.dims();
            for (int i = 0; i < vd.p; ++i)
                for (int j = 0; j < vd.q; ++j)
                    for (int k = 0; k < vd.r; ++k) big(i, j, k) = v(i, j, k);
            const Decomposition full = route(big, tol);
            Decomposition cut;
            cut.dims = vd;
            for (const SimpleTerm& term : full.terms)
                push_term(cut, term.a.head(vd.p), term.b.head(vd.q), term.c.head(vd.r));
            return cut;
        });
    });
    detail::finish(out, t);
    if (out.residual > tol.residual_tol) {
        throw DecompositionFailure("dispatch", fmt::format("residual {:.3e} above tolerance", out.residual));
    }
    return out;
}

} // namespace tensorlab
