#pragma once

#include <array>

#include "tensorlab/dense_tensor.hpp"

namespace tensorlab {

/// Numerical thresholds for the complex routines. rank_tol is a relative
/// singular-value cutoff, eig_cluster_tol an eigenvalue merging radius
/// relative to the matrix norm, residual_tol the largest accepted relative
/// max-norm error of a decomposition.
struct Tolerance {
    double rank_tol = 1e-9;
    double eig_cluster_tol = 1e-6;
    double residual_tol = 1e-6;

    /// Throws std::invalid_argument unless all are positive and rank_tol <= eig_cluster_tol.
    void validate() const;
};

/// Singular values above rank_tol * sigma_max (0 for the zero matrix).
int numerical_rank(const CMatrix& m, const Tolerance& tol = {});

/// Singular values above rel_tol * max(sigma_max, reference_norm); lets a slice
/// be judged against the norm of the whole array it belongs to.
int numerical_rank(const CMatrix& m, double rel_tol, double reference_norm);

/// Unit x minimizing |m x| (right singular vector of the smallest singular value).
CVector right_null_vector(const CMatrix& m);
/// Unit y minimizing |y^t m|; note the plain transpose, not the adjoint.
CVector left_null_vector(const CMatrix& m);

/// sigma_max / sigma_min, infinite for a singular matrix.
double condition_number(const CMatrix& m);

/// Best rank-one factors u, v with m ~ u v^t.
void rank_one_factors(const CMatrix& m, CVector& u, CVector& v);

/// Jordan shapes of a 3x3 matrix: three 1x1 blocks, a 2x2 block followed by a
/// 1x1 block, or one 3x3 block.
enum class JordanShape { diagonal = 1, block21 = 2, block3 = 3 };

struct JordanForm {
    CMatrix e;              // columns are (generalized) eigenvectors
    CMatrix j;              // idealized canonical form
    JordanShape shape = JordanShape::diagonal;
    double residual = 0.0;  // |E^-1 M E - J| / |M| in the Frobenius norm
    double condition = 1.0; // condition number of E
    bool ill_conditioned = false;
};

/// Eigenvalues closer than eig_cluster_tol * |M| are merged; block sizes come
/// from the numerical ranks of (M - d I) and (M - d I)^2 at the same tolerance.
JordanForm jordan_3x3(const CMatrix& m, const Tolerance& tol = {});

/// A root of the pencil det(A - lambda C). `degenerate` is set when the
/// determinant does not depend on lambda.
struct PencilRoot {
    Scalar lambda{};
    bool degenerate = false;
    double sigma_min = 0.0; // smallest singular value of A - lambda C relative to the pencil scale
};

/// Coefficients of det(A - lambda C) = sum c_k lambda^k for 3x3 matrices, by
/// interpolation at four points on a circle.
std::array<Scalar, 4> pencil_polynomial(const CMatrix& a, const CMatrix& c);

/// Chooses lambda making A - lambda C singular; lambda = 0 if A already is.
PencilRoot singularize_slice(const CMatrix& a, const CMatrix& c, const Tolerance& tol = {});

/// Roots of c_0 + c_1 z + ... + c_n z^n with leading coefficient nonzero.
std::vector<Scalar> polynomial_roots(const std::vector<Scalar>& coeffs);

} // namespace tensorlab
