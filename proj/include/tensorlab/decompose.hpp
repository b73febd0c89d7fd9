#pragma once

#include <string>

#include "tensorlab/dense_tensor.hpp"
#include "tensorlab/linalg.hpp"

namespace tensorlab {

/// Cayley's hyperdeterminant of a 2x2x2 array, evaluated term by term.
Scalar hyperdeterminant(const DenseTensor& x);

/// One of the four patterns with exactly two antipodal nonzero entries
/// (x111 & x222, x121 & x212, x211 & x122, x221 & x112); other entries must
/// be within rank_tol of zero relative to the largest entry.
bool is_superdiagonal(const DenseTensor& x, const Tolerance& tol = {});

int rank_222(const DenseTensor& x, const Tolerance& tol = {});

/// Decomposition with rank_222(x) terms.
Decomposition decompose_222(const DenseTensor& x, const Tolerance& tol = {});

/// At most four terms for a 3x3x2 array.
Decomposition decompose_332(const DenseTensor& x, const Tolerance& tol = {});

/// At most three terms for a 2x2x3 array.
Decomposition decompose_223(const DenseTensor& x, const Tolerance& tol = {});

enum class NullSide { right, left };

/// Reduction for two parallel slices (direction `dir`, indices `first` and
/// `second`) sharing a null vector x: D x = E x = 0 (right side) or
/// D^t x = E^t x = 0 (left side). At most five terms.
Decomposition one_edge_reduce(const DenseTensor& t, Direction dir, int first, int second, const CVector& x,
                              NullSide side, const Tolerance& tol = {});

/// Reduction when the first frontal slice A satisfies A x = y^t A = 0 and
/// y^t B x is nonzero for the second frontal slice B. At most five terms.
Decomposition two_edge_reduce(const DenseTensor& t, const CVector& x, const CVector& y, const Tolerance& tol = {});

/// At most five terms for a 3x3x3 array.
Decomposition decompose_333(const DenseTensor& t, const Tolerance& tol = {});

/// Pads any array up to 3x3x3 in the cheapest supported format and decomposes
/// it: 2x2x2 exactly, two-slice formats with at most four terms, otherwise five.
Decomposition decompose(const DenseTensor& t, const Tolerance& tol = {});

/// Relative max-norm residual |T - evaluate(d)| / |T| (absolute when T = 0).
double verify(const DenseTensor& t, const Decomposition& d);

} // namespace tensorlab
