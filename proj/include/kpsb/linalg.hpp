#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "kpsb/matrix.hpp"

namespace kpsb {

//
// Column stacking. vec/array use the column-major convention of the image
// model (x = vec(X)), while Matrix storage is row-major; the two conventions
// meet only here.
//
template <Real T>
Vector<T> vec(const Matrix<T>& m)
{
    Vector<T> v(m.size());
    std::size_t k = 0;
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i)
            v[k++] = m(i, j);
    return v;
}

template <Real T>
Matrix<T> array(std::span<const T> v, std::size_t rows, std::size_t cols)
{
    if (v.size() != rows * cols)
        detail::fail_dims("array", "vector length " + std::to_string(v.size()) + " != " + std::to_string(rows) + "x"
                                       + std::to_string(cols));
    Matrix<T> m(rows, cols);
    std::size_t k = 0;
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i)
            m(i, j) = v[k++];
    return m;
}

template <Real U, Real T>
Matrix<U> cast(const Matrix<T>& m)
{
    if constexpr (std::same_as<U, T>) {
        return m;
    } else {
        Matrix<U> out(m.rows(), m.cols());
        std::transform(m.values().begin(), m.values().end(), out.values().begin(),
                       [](T x) { return static_cast<U>(x); });
        return out;
    }
}

template <Real U, Real T>
Vector<U> cast(std::span<const T> v)
{
    return Vector<U>(v.begin(), v.end());
}

//
// level-1
//

template <Real T>
T dot(std::span<const T> x, std::span<const T> y)
{
    T s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * y[i];
    return s;
}

template <Real T>
T norm2(std::span<const T> x)
{
    return std::sqrt(dot(x, x));
}

// y += a*x
template <Real T>
void axpy(T a, std::span<const T> x, std::span<T> y)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] += a * x[i];
}

template <Real T>
void scale(T a, std::span<T> x)
{
    for (auto& v : x)
        v *= a;
}

// ||x - y||_2
template <Real T>
T distance(std::span<const T> x, std::span<const T> y)
{
    T s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

template <Real T>
T frobenius_norm(const Matrix<T>& m)
{
    return norm2(m.values());
}

template <Real T>
bool all_finite(std::span<const T> x)
{
    return std::all_of(x.begin(), x.end(), [](T v) { return std::isfinite(v); });
}

//
// level-2/3 (row-major, plain loops, deterministic)
//

template <Real T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        detail::fail_dims("operator-", "shape mismatch");
    Matrix<T> c = a;
    for (std::size_t i = 0; i < c.size(); ++i)
        c.data()[i] -= b.data()[i];
    return c;
}

template <Real T>
Matrix<T> operator+(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        detail::fail_dims("operator+", "shape mismatch");
    Matrix<T> c = a;
    for (std::size_t i = 0; i < c.size(); ++i)
        c.data()[i] += b.data()[i];
    return c;
}

// y = A x
template <Real T>
Vector<T> matvec(const Matrix<T>& a, std::span<const T> x);

// y = A^T x
template <Real T>
Vector<T> matvec_t(const Matrix<T>& a, std::span<const T> x);

// C = A B
template <Real T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b);

// C = A^T B
template <Real T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b);

// Kronecker product B (x) C.
template <Real T>
Matrix<T> kron(const Matrix<T>& b, const Matrix<T>& c);

//
// Gram-Schmidt orthonormalization
//

// Thrown by orthonormalize() when a column is (numerically) in the span of
// the previous ones.
class RankDeficientError : public NumericalError {
public:
    RankDeficientError(std::size_t column, const std::string& msg)
        : NumericalError(msg)
        , column_(column)
    {
    }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

// Q with Q^T Q = I and span(Q) = span(M). Modified Gram-Schmidt with one
// reorthogonalization pass. A column whose norm after projection falls below
// eps * sqrt(rows) * max_j ||M_j|| raises RankDeficientError.
template <Real T>
Matrix<T> orthonormalize(const Matrix<T>& m);

//
// SVD of small dense matrices
//

// U (m x k), sigma (k, descending, >= 0), V (n x k) with A ~ U diag(sigma) V^T.
template <Real T>
struct TruncatedSvd {
    Matrix<T> u;
    Vector<T> sigma;
    Matrix<T> v;

    std::size_t rank() const noexcept { return sigma.size(); }

    // Keep the first k triplets.
    TruncatedSvd truncated(std::size_t k) const
    {
        k = std::min(k, rank());
        return {u.leading_cols(k), Vector<T>(sigma.begin(), sigma.begin() + static_cast<std::ptrdiff_t>(k)),
                v.leading_cols(k)};
    }

    // U diag(sigma) V^T
    Matrix<T> reconstruct() const;
};

struct SvdOptions {
    // Largest min(rows, cols) accepted; the dense one-sided Jacobi is cubic.
    std::size_t max_min_dim = 1024;
    int max_sweeps = 80;
};

// Full SVD (k = min(rows, cols)) by one-sided Jacobi rotations.
// Singular vectors that belong to zero singular values are completed to an
// orthonormal set.
template <Real T>
TruncatedSvd<T> svd_small(const Matrix<T>& m, const SvdOptions& opts = {});

//
// Gaussian sampling. Draws are made in double and rounded, so Single and
// Double runs with the same seed see the same samples up to rounding.
//

template <Real T>
Vector<T> gaussian_vector(std::size_t n, std::uint64_t seed);

template <Real T>
Matrix<T> gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

} // namespace kpsb
