#pragma once

#include <cstddef>
#include <string>

#include "kpsb/matrix.hpp"

namespace kpsb {

// Block partition of an M x N matrix into an m1 x n1 grid of m2 x n2 blocks.
struct BlockScheme {
    std::size_t m1 = 0, m2 = 0, n1 = 0, n2 = 0;

    // Scheme for an n^2 x n^2 operator on n x n images: m1 = m2 = n1 = n2 = n.
    static BlockScheme square(std::size_t n) { return {n, n, n, n}; }

    std::size_t rows() const noexcept { return m1 * m2; } // M
    std::size_t cols() const noexcept { return n1 * n2; } // N
    std::size_t rearranged_rows() const noexcept { return m1 * n1; }
    std::size_t rearranged_cols() const noexcept { return m2 * n2; }

    std::string describe() const;

    friend bool operator==(const BlockScheme&, const BlockScheme&) = default;
};

// R(A): row j*m1 + i holds vec(A_{i,j})^T (0-based block indices, column-major
// vec inside each block). Size (m1*n1) x (m2*n2).
template <Real T>
Matrix<T> rearrange(const Matrix<T>& a, const BlockScheme& s);

// Inverse permutation of rearrange().
template <Real T>
Matrix<T> inverse_rearrange(const Matrix<T>& r, const BlockScheme& s);

} // namespace kpsb
