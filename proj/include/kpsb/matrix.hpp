#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "kpsb/error.hpp"

namespace kpsb {

// Element precision of a dense container. The numeric value is the bit width
// and is also the precision code stored in mtx files.
enum class Precision : std::uint8_t { Single = 32, Double = 64 };

template <typename T>
concept Real = std::same_as<T, float> || std::same_as<T, double>;

template <Real T>
inline constexpr Precision precision_of = std::same_as<T, float> ? Precision::Single : Precision::Double;

inline const char* to_string(Precision p)
{
    return p == Precision::Single ? "single" : "double";
}

template <Real T>
using Vector = std::vector<T>;

//
// Dense row-major matrix. The element type fixes the precision for the
// lifetime of the object; converting between precisions goes through cast().
//
template <Real T>
class Matrix {
public:
    using value_type = T;
    static constexpr Precision precision = precision_of<T>;

    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
        : rows_(rows)
        , cols_(cols)
        , data_(rows * cols, fill)
    {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows)
        , cols_(cols)
        , data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_)
            detail::fail_dims("Matrix", "data length does not match rows*cols");
    }

    // Row-by-row literal, mainly for tests: Matrix<double>{{1, 2}, {3, 4}}.
    Matrix(std::initializer_list<std::initializer_list<T>> rows)
        : rows_(rows.size())
        , cols_(rows.size() ? rows.begin()->size() : 0)
    {
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                detail::fail_dims("Matrix", "ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

    static Matrix diagonal(std::span<const T> d)
    {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    Vector<T> col(std::size_t j) const
    {
        Vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    void set_col(std::size_t j, std::span<const T> c)
    {
        if (c.size() != rows_)
            detail::fail_dims("Matrix::set_col", "length mismatch");
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, j) = c[i];
    }

    // First `k` columns.
    Matrix leading_cols(std::size_t k) const
    {
        k = std::min(k, cols_);
        Matrix out(rows_, k);
        for (std::size_t i = 0; i < rows_; ++i)
            std::copy_n(data_.data() + i * cols_, k, out.data() + i * k);
        return out;
    }

    Matrix transposed() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    // Releases the storage (used when a large operand is no longer needed).
    void release() noexcept
    {
        std::vector<T>().swap(data_);
        rows_ = cols_ = 0;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using MatrixD = Matrix<double>;
using MatrixF = Matrix<float>;
using VectorD = Vector<double>;
using VectorF = Vector<float>;

} // namespace kpsb
