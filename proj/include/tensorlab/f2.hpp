#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "tensorlab/dense_tensor.hpp"

namespace tensorlab {

/// Tensor over F2 packed into an integer. Entries are read in lex order of
/// (i, j, k); x_111 is the most significant bit and x_pqr the least.
using F2Code = std::uint32_t;

/// Bit index of entry (i, j, k) (0-based) in a code of the given format.
constexpr int f2_bit(Dims d, int i, int j, int k) { return d.size() - 1 - ((i * d.q + j) * d.r + k); }

constexpr F2Code f2_code_limit(Dims d) { return static_cast<F2Code>((std::uint64_t{1} << d.size()) - 1); }

/// Square matrix over F2 of order 1..3. Row u is a bitmask; bit t is entry (u, t).
class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(int n, std::array<std::uint8_t, 3> rows);
    static F2Matrix identity(int n);
    /// Row-major 0/1 entries.
    static F2Matrix from_entries(int n, std::initializer_list<int> entries);

    int order() const { return n_; }
    bool at(int u, int t) const { return (rows_[u] >> t) & 1u; }
    std::uint8_t row(int u) const { return rows_[u]; }
    bool invertible() const;
    F2Matrix inverse() const;
    CMatrix to_complex() const;

    friend F2Matrix operator*(const F2Matrix& x, const F2Matrix& y);
    friend bool operator==(const F2Matrix&, const F2Matrix&) = default;
    friend auto operator<=>(const F2Matrix&, const F2Matrix&) = default;

private:
    int n_ = 0;
    std::array<std::uint8_t, 3> rows_{};
};

/// Element (A, B, C) of GL_p x GL_q x GL_r over F2 followed by an optional
/// direction permutation. Matrices are sized to the direction they act on.
class GroupElement {
public:
    GroupElement(F2Matrix a, F2Matrix b, F2Matrix c, DirectionPerm perm = identity_perm);
    static GroupElement identity(Dims d);

    const F2Matrix& a() const { return a_; }
    const F2Matrix& b() const { return b_; }
    const F2Matrix& c() const { return c_; }
    const DirectionPerm& perm() const { return perm_; }
    const F2Matrix& matrix(int direction) const { return direction == 0 ? a_ : direction == 1 ? b_ : c_; }

    /// Element g^-1 with act(act(x, g), g^-1) = x.
    GroupElement inverse() const;

private:
    F2Matrix a_, b_, c_;
    DirectionPerm perm_;
};

/// Throws std::invalid_argument for entries outside {0, 1}.
F2Code encode(const DenseTensor& t);
/// Throws std::out_of_range if `code` has bits beyond the format.
DenseTensor decode(F2Code code, Dims d);

/// Multiplies along one direction by an F2 matrix using plane masks; this is
/// the inner operation of orbit spinning.
class LinearCodeMap {
public:
    LinearCodeMap(Dims d, int direction, const F2Matrix& m);

    F2Code operator()(F2Code x) const {
        std::array<F2Code, 3> aligned{};
        for (int t = 0; t < n_; ++t) aligned[t] = (x & mask_[t]) << shift_[t];
        F2Code out = 0;
        for (int u = 0; u < n_; ++u) {
            F2Code v = 0;
            for (int t = 0; t < n_; ++t)
                if ((rows_[u] >> t) & 1u) v ^= aligned[t];
            out |= v >> shift_[u];
        }
        return out;
    }

private:
    int n_;
    std::array<F2Code, 3> mask_{};
    std::array<int, 3> shift_{};
    std::array<std::uint8_t, 3> rows_{};
};

/// Bit-position permutation realizing permute_directions() on codes.
class PermutationCodeMap {
public:
    PermutationCodeMap(Dims d, const DirectionPerm& perm);
    F2Code operator()(F2Code x) const;
    Dims target_dims() const { return target_; }

private:
    Dims target_;
    std::vector<int> destination_; // destination bit of each source bit
};

/// Action of g on a code; the permutation must map `d` to itself.
F2Code act(F2Code x, Dims d, const GroupElement& g);
DenseTensor act(const DenseTensor& t, const GroupElement& g);

/// All invertible n x n matrices over F2, generated by closure from the
/// cyclic permutation and the transvection e1 -> e1 + e2 (n = 1: identity).
std::vector<F2Matrix> gl_f2_elements(int n);
std::vector<F2Matrix> gl3_f2_elements();
std::vector<F2Matrix> gl_f2_generators(int n);

/// One generator per (direction, matrix generator) with identities elsewhere;
/// 6 elements for the 3x3x3 format.
std::vector<GroupElement> census_generators(Dims d);

/// Direction permutations that map the format onto itself.
std::vector<DirectionPerm> format_preserving_perms(Dims d);

/// Uniformly random element of GL_p x GL_q x GL_r (times a format-preserving
/// permutation when `with_perm`), for property tests.
GroupElement random_group_element(Dims d, std::mt19937_64& rng, bool with_perm = false);

} // namespace tensorlab
