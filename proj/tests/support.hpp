#pragma once

#include <random>
#include <vector>

#include "tensorlab/dense_tensor.hpp"

namespace tensorlab::testing {

inline DenseTensor random_tensor(Dims d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::vector<Scalar> e(static_cast<std::size_t>(d.size()));
    for (Scalar& z : e) z = {gauss(rng), gauss(rng)};
    return DenseTensor(d, std::move(e));
}

inline CVector random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = {gauss(rng), gauss(rng)};
    return v;
}

inline CMatrix random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = {gauss(rng), gauss(rng)};
    return m;
}

inline CMatrix mat(int rows, int cols, std::initializer_list<Scalar> v) {
    CMatrix m(rows, cols);
    auto it = v.begin();
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = *it++;
    return m;
}

inline CVector vec(std::initializer_list<Scalar> v) {
    CVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (Scalar z : v) out(i++) = z;
    return out;
}

} // namespace tensorlab::testing
