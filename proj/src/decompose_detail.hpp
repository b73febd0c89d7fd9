#pragma once

// Helpers shared by the decomposition routines.

#include <functional>

#include "tensorlab/decompose.hpp"

namespace tensorlab::detail {

/// Appends a⊗b⊗c unless a factor vanishes exactly.
void push_term(Decomposition& d, const CVector& a, const CVector& b, const CVector& c);

void append(Decomposition& d, const Decomposition& more);

/// Decomposition of (P, Q, R) . T given one of T.
Decomposition map_terms(const Decomposition& d, const CMatrix& p, const CMatrix& q, const CMatrix& r);

/// Decomposes T by permuting its directions, running fn and permuting back.
Decomposition via_perm(const DenseTensor& t, const DirectionPerm& perm,
                       const std::function<Decomposition(const DenseTensor&)>& fn);

/// Decomposes T = (P, Q, R) . T' by running fn on T' = (P^-1, Q^-1, R^-1) . T.
Decomposition via_basis(const DenseTensor& t, const CMatrix& p, const CMatrix& q, const CMatrix& r,
                        const std::function<Decomposition(const DenseTensor&)>& fn);

/// Drops terms whose outer product is negligible against the target and
/// records the residual.
void finish(Decomposition& d, const DenseTensor& target);

/// Frobenius norm of an array, the reference for all rank decisions inside it.
double tensor_norm(const DenseTensor& t);

/// The array with one frontal slice removed (3 slices -> 2).
DenseTensor drop_frontal(const DenseTensor& t, int k);

/// Embeds a decomposition of drop_frontal(t, k) back into t's format.
Decomposition insert_frontal(const Decomposition& d, int k);

/// Splits each frontal slice by SVD, with c = e_k for the terms of slice k.
Decomposition slice_split(const DenseTensor& t, const Tolerance& tol, double reference);

/// Decomposes a 3x3x3 array whose slice `index` along `dir` vanishes, through
/// the 3x3x2 routine (at most four terms).
Decomposition decompose_with_zero_slice(const DenseTensor& t, Direction dir, int index, const Tolerance& tol);

CMatrix identity(int n);

} // namespace tensorlab::detail
