#pragma once

#include <array>
#include <complex>
#include <compare>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace tensorlab {

using Scalar = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Shape of a p x q x r array; each extent is in 1..3.
struct Dims {
    int p = 1;
    int q = 1;
    int r = 1;

    constexpr int operator[](int direction) const { return direction == 0 ? p : direction == 1 ? q : r; }
    constexpr int size() const { return p * q * r; }
    constexpr bool valid() const { return p >= 1 && p <= 3 && q >= 1 && q <= 3 && r >= 1 && r <= 3; }

    friend constexpr auto operator<=>(const Dims&, const Dims&) = default;
};

/// Slice orientation: fixing i gives a horizontal slice, fixing j a vertical
/// slice and fixing k a frontal slice.
enum class Direction : int { horizontal = 0, vertical = 1, frontal = 2 };

/// Direction permutation. Direction m of the permuted array is direction
/// `perm[m]` of the original one, so entry idx' of the result equals entry idx
/// of the source with idx'[m] = idx[perm[m]].
using DirectionPerm = std::array<int, 3>;

inline constexpr DirectionPerm identity_perm{0, 1, 2};

DirectionPerm inverse(const DirectionPerm& perm);

/// Dense complex p x q x r array with entries stored in lex order of (i, j, k).
/// All indices in this API are 0-based; messages report them 1-based.
class DenseTensor {
public:
    explicit DenseTensor(Dims dims = {});
    DenseTensor(Dims dims, std::vector<Scalar> entries);

    /// Builds a tensor from its frontal slices, each p x q.
    static DenseTensor from_frontal(std::span<const CMatrix> slices);

    Dims dims() const { return dims_; }
    std::span<const Scalar> entries() const { return entries_; }

    Scalar operator()(int i, int j, int k) const { return entries_[offset(i, j, k)]; }
    Scalar& operator()(int i, int j, int k) { return entries_[offset(i, j, k)]; }

    CMatrix frontal(int k) const;

    double max_norm() const;
    double frobenius_norm() const;
    bool is_zero() const;

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);
    DenseTensor& operator*=(Scalar s);

    friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
    friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
    friend DenseTensor operator*(Scalar s, DenseTensor a) { return a *= s; }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    int offset(int i, int j, int k) const { return (i * dims_.q + j) * dims_.r + k; }

    Dims dims_;
    std::vector<Scalar> entries_;
};

/// One outer product a (x) b (x) c with nonzero factors.
struct SimpleTerm {
    CVector a;
    CVector b;
    CVector c;
};

/// A sum of simple terms approximating a target array. `residual` is the
/// relative max-norm error recorded by the routine that produced it.
struct Decomposition {
    Dims dims;
    std::vector<SimpleTerm> terms;
    double residual = 0.0;

    std::size_t size() const { return terms.size(); }
};

DenseTensor outer_product(const CVector& a, const CVector& b, const CVector& c);

/// Validated simple term; throws std::invalid_argument if a factor is zero.
SimpleTerm make_simple_term(CVector a, CVector b, CVector c);

DenseTensor to_tensor(const SimpleTerm& term);

/// The 2-D submatrix with `index` fixed along `direction`: horizontal slices
/// are q x r, vertical p x r and frontal p x q.
CMatrix slice(const DenseTensor& t, Direction direction, int index);

/// Change of basis ((A, B, C) . X)_{i1 j1 k1} = sum a_{i1 i2} b_{j1 j2} c_{k1 k2} x_{i2 j2 k2}.
/// Each matrix is square and sized to its direction; throws std::invalid_argument
/// on size mismatch or a singular matrix.
DenseTensor act(const DenseTensor& t, const CMatrix& a, const CMatrix& b, const CMatrix& c);

/// Same as act() without the invertibility check; for internal reductions.
DenseTensor apply_basis_change(const DenseTensor& t, const CMatrix& a, const CMatrix& b, const CMatrix& c);

DenseTensor permute_directions(const DenseTensor& t, const DirectionPerm& perm);

SimpleTerm transform(const SimpleTerm& term, const CMatrix& a, const CMatrix& b, const CMatrix& c);
SimpleTerm permute_directions(const SimpleTerm& term, const DirectionPerm& perm);

/// Entrywise sum of the outer products; throws std::invalid_argument when a
/// term's factor lengths disagree with d.dims.
DenseTensor evaluate(const Decomposition& d);

/// Max-norm difference at most tol times the larger max-norm of the operands.
bool approx_equal(const DenseTensor& a, const DenseTensor& b, double tol = 1e-9);

} // namespace tensorlab
