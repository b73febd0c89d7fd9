#include "tensorlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace tensorlab {

namespace {

using Svd = Eigen::JacobiSVD<CMatrix>;

Svd full_svd(const CMatrix& m) { return Svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV); }

double sigma_min_relative(const CMatrix& m, double scale) {
    if (scale <= 0.0) return 0.0;
    const Eigen::VectorXd s = Svd(m).singularValues();
    return s(s.size() - 1) / scale;
}

} // namespace

void Tolerance::validate() const {
    if (!(rank_tol > 0) || !(eig_cluster_tol > 0) || !(residual_tol > 0)) {
        throw std::invalid_argument("tolerances must be positive");
    }
    if (rank_tol > eig_cluster_tol) throw std::invalid_argument("rank tolerance exceeds the eigenvalue cluster tolerance");
}

int numerical_rank(const CMatrix& m, double rel_tol, double reference_norm) {
    if (m.size() == 0) return 0;
    const Eigen::VectorXd s = Svd(m).singularValues();
    const double cutoff = rel_tol * std::max(s(0), reference_norm);
    if (s(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index n = 0; n < s.size(); ++n)
        if (s(n) > cutoff) ++rank;
    return rank;
}

int numerical_rank(const CMatrix& m, const Tolerance& tol) { return numerical_rank(m, tol.rank_tol, 0.0); }

CVector right_null_vector(const CMatrix& m) {
    const Svd svd = full_svd(m);
    return svd.matrixV().col(svd.matrixV().cols() - 1);
}

CVector left_null_vector(const CMatrix& m) {
    // m = U S V^H, so y = conj(u_last) gives y^t m = s_last v_last^H.
    const Svd svd = full_svd(m);
    return svd.matrixU().col(svd.matrixU().cols() - 1).conjugate();
}

double condition_number(const CMatrix& m) {
    const Eigen::VectorXd s = Svd(m).singularValues();
    if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / s(s.size() - 1);
}

void rank_one_factors(const CMatrix& m, CVector& u, CVector& v) {
    const Svd svd = full_svd(m);
    u = svd.singularValues()(0) * svd.matrixU().col(0);
    v = svd.matrixV().col(0).conjugate();
}

JordanForm jordan_3x3(const CMatrix& m, const Tolerance& tol) {
    if (m.rows() != 3 || m.cols() != 3) throw std::invalid_argument("jordan_3x3 needs a 3x3 matrix");
    JordanForm out;
    const double norm = m.norm();
    const CMatrix id = CMatrix::Identity(3, 3);
    if (norm == 0.0) {
        out.e = id;
        out.j = CMatrix::Zero(3, 3);
        return out;
    }
    const double radius = tol.eig_cluster_tol * norm;
    Eigen::ComplexEigenSolver<CMatrix> eig(m, true);
    const CVector lambda = eig.eigenvalues();

    // Cluster eigenvalues: label[n] is the smallest index in n's cluster.
    std::array<int, 3> label{0, 1, 2};
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (std::abs(lambda(a) - lambda(b)) <= radius) {
                const int lo = std::min(label[a], label[b]), hi = std::max(label[a], label[b]);
                for (int &l : label)
                    if (l == hi) l = lo;
            }
    // A defective triple eigenvalue splits by about (eps * cond)^(1/3), far
    // beyond the cluster radius; recognize it by m - (tr m / 3) being nilpotent.
    {
        const CMatrix n1 = m - (m.trace() / 3.0) * id;
        if ((n1 * n1 * n1).norm() <= tol.rank_tol * norm * norm * norm) label = {0, 0, 0};
    }
    std::vector<std::vector<int>> clusters;
    for (int n = 0; n < 3; ++n) {
        if (label[n] != n) continue;
        std::vector<int> members;
        for (int k = 0; k < 3; ++k)
            if (label[k] == n) members.push_back(k);
        clusters.push_back(members);
    }
    const auto mean = [&](const std::vector<int>& c) {
        Scalar s{};
        for (int k : c) s += lambda(k);
        return s / static_cast<double>(c.size());
    };
    const auto rank_at = [&](const CMatrix& x) { return numerical_rank(x, tol.eig_cluster_tol, norm); };
    const auto null_basis = [](const CMatrix& x, int dim) {
        const Svd svd = full_svd(x);
        return CMatrix(svd.matrixV().rightCols(dim));
    };

    CMatrix e(3, 3);
    CMatrix j = CMatrix::Zero(3, 3);
    if (clusters.size() == 3) {
        e = eig.eigenvectors();
        for (int n = 0; n < 3; ++n) j(n, n) = lambda(n);
        out.shape = JordanShape::diagonal;
    } else if (clusters.size() == 2) {
        const auto& twin = clusters[0].size() == 2 ? clusters[0] : clusters[1];
        const auto& single = clusters[0].size() == 2 ? clusters[1] : clusters[0];
        const Scalar d1 = mean(twin), d2 = mean(single);
        const CMatrix n1 = m - d1 * id;
        const CVector w = right_null_vector(m - d2 * id);
        if (rank_at(n1) <= 1) {
            const CMatrix k = null_basis(n1, 2);
            e << k.col(0), k.col(1), w;
            j.diagonal() << d1, d1, d2;
            out.shape = JordanShape::diagonal;
        } else {
            // Chain v1 = N v2 with v2 in ker N^2 chosen to maximize |N v2|.
            const CMatrix k = null_basis(n1 * n1, 2);
            const Svd inner = full_svd(n1 * k);
            const CVector v2 = k * inner.matrixV().col(0);
            const CVector v1 = n1 * v2;
            e << v1, v2, w;
            j << d1, 1.0, 0.0, 0.0, d1, 0.0, 0.0, 0.0, d2;
            out.shape = JordanShape::block21;
        }
    } else {
        const Scalar d = mean(clusters[0]);
        const CMatrix n1 = m - d * id;
        const int r = rank_at(n1);
        if (r == 0) {
            e = id;
            j = d * id;
            out.shape = JordanShape::diagonal;
        } else if (r == 1) {
            const Svd svd = full_svd(n1);
            const CVector v2 = svd.matrixV().col(0);
            const CVector v1 = n1 * v2;
            const CMatrix k = svd.matrixV().rightCols(2);
            // Pick the kernel direction least aligned with v1.
            const Eigen::RowVectorXcd proj = v1.adjoint() * k;
            Eigen::Vector2cd z(proj(1), -proj(0));
            if (z.norm() == 0.0) z << 1.0, 0.0;
            const CVector w = k * z.normalized();
            e << v1, v2, w;
            j << d, 1.0, 0.0, 0.0, d, 0.0, 0.0, 0.0, d;
            out.shape = JordanShape::block21;
        } else {
            const Svd svd = full_svd(n1 * n1);
            const CVector v3 = svd.matrixV().col(0);
            const CVector v2 = n1 * v3;
            const CVector v1 = n1 * v2;
            e << v1, v2, v3;
            j << d, 1.0, 0.0, 0.0, d, 1.0, 0.0, 0.0, d;
            out.shape = JordanShape::block3;
        }
    }
    out.e = e;
    out.j = j;
    out.condition = condition_number(e);
    out.ill_conditioned = !(out.condition <= 1.0 / tol.rank_tol);
    if (std::isfinite(out.condition)) {
        out.residual = (e.lu().solve(m * e) - j).norm() / norm;
    } else {
        out.residual = std::numeric_limits<double>::infinity();
    }
    return out;
}

std::array<Scalar, 4> pencil_polynomial(const CMatrix& a, const CMatrix& c) {
    if (a.rows() != 3 || a.cols() != 3 || c.rows() != 3 || c.cols() != 3) {
        throw std::invalid_argument("pencil needs 3x3 matrices");
    }
    const double na = a.norm(), nc = c.norm();
    const double s = (na > 0.0 && nc > 0.0) ? na / nc : 1.0;
    // p(s w^m) for the fourth roots of unity w^m; an inverse DFT recovers c_k s^k.
    const std::array<Scalar, 4> w{Scalar{1, 0}, Scalar{0, 1}, Scalar{-1, 0}, Scalar{0, -1}};
    std::array<Scalar, 4> samples{};
    for (int m = 0; m < 4; ++m) samples[m] = CMatrix(a - (s * w[m]) * c).determinant();
    std::array<Scalar, 4> coeffs{};
    for (int k = 0; k < 4; ++k) {
        Scalar acc{};
        for (int m = 0; m < 4; ++m) acc += samples[m] * std::conj(w[(m * k) % 4]);
        coeffs[k] = acc / 4.0 / std::pow(s, k);
    }
    return coeffs;
}

std::vector<Scalar> polynomial_roots(const std::vector<Scalar>& coeffs) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1 || coeffs.back() == Scalar{}) throw std::invalid_argument("polynomial needs a nonzero leading coefficient");
    if (n == 1) return {-coeffs[0] / coeffs[1]};
    CMatrix companion = CMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
    for (int k = 0; k < n; ++k) companion(k, n - 1) = -coeffs[k] / coeffs[n];
    const CVector ev = Eigen::ComplexEigenSolver<CMatrix>(companion, false).eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

PencilRoot singularize_slice(const CMatrix& a, const CMatrix& c, const Tolerance& tol) {
    const double na = a.norm(), nc = c.norm();
    if (nc == 0.0) throw std::invalid_argument("singularize_slice needs a nonzero pencil matrix");
    const double reference = std::max(na, nc);
    PencilRoot out;
    if (numerical_rank(a, tol.rank_tol, reference) <= 2) {
        out.sigma_min = sigma_min_relative(a, reference);
        return out;
    }
    const double s = na / nc;
    const std::array<Scalar, 4> coeffs = pencil_polynomial(a, c);
    // Work in mu = lambda / s so that all coefficients share the scale |A|^3.
    std::vector<Scalar> scaled(4);
    for (int k = 0; k < 4; ++k) scaled[k] = coeffs[k] * std::pow(s, k);
    const double threshold = tol.rank_tol * na * na * na;
    int degree = 3;
    while (degree > 0 && std::abs(scaled[degree]) <= threshold) --degree;
    if (degree == 0) {
        out.degenerate = true;
        out.sigma_min = sigma_min_relative(a, reference);
        return out;
    }
    scaled.resize(degree + 1);
    std::vector<Scalar> roots = polynomial_roots(scaled);
    const auto eval = [&](Scalar z, Scalar& deriv) {
        Scalar p{};
        deriv = Scalar{};
        for (int k = degree; k >= 0; --k) {
            deriv = deriv * z + p;
            p = p * z + scaled[k];
        }
        return p;
    };
    for (Scalar& z : roots) {
        Scalar dp;
        const Scalar p = eval(z, dp);
        if (std::abs(dp) > 0.0) {
            const Scalar step = p / dp;
            if (std::abs(step) <= 1e-3 * (1.0 + std::abs(z))) z -= step;
        }
    }
    // Multiple roots are found only to a fraction of working precision; the
    // mean of a cluster is far more accurate, so cluster means join the pool.
    std::vector<Scalar> candidates = roots;
    const double radius = std::max(tol.eig_cluster_tol, 1e-4);
    for (std::size_t x = 0; x < roots.size(); ++x) {
        Scalar sum = roots[x];
        int count = 1;
        for (std::size_t y = 0; y < roots.size(); ++y)
            if (y != x && std::abs(roots[x] - roots[y]) <= radius * (1.0 + std::abs(roots[x]))) {
                sum += roots[y];
                ++count;
            }
        if (count > 1) candidates.push_back(sum / static_cast<double>(count));
    }
    double best = std::numeric_limits<double>::infinity();
    bool best_ok = false;
    for (const Scalar& mu : candidates) {
        const Scalar lambda = mu * s;
        const CMatrix shifted = a - lambda * c;
        const double scale = na + std::abs(lambda) * nc;
        const double smin = sigma_min_relative(shifted, scale);
        const bool ok = smin <= tol.rank_tol;
        // Among candidates that make the slice singular, prefer small |lambda|.
        const bool better = ok ? (!best_ok || std::abs(lambda) < std::abs(out.lambda)) : (!best_ok && smin < best);
        if (better) {
            out.lambda = lambda;
            out.sigma_min = smin;
            best = smin;
            best_ok = ok;
        }
    }
    return out;
}

} // namespace tensorlab
