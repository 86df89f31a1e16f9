#pragma once

#include <span>

#include "kpsb/operators.hpp"

namespace kpsb {

//
// First differences on an n x n image x = vec(X) with
//
//   L = 1/2 [1 -1 0 ... ; 0 1 -1 ... ; ...]   ((n-1) x n, no boundary row)
//
// diff_x(x) = (L (x) I) x = vec(X L^T)   (along image columns), length n(n-1)
// diff_y(x) = (I (x) L) x = vec(L X)     (along image rows),    length n(n-1)
//
VectorD diff_x(std::span<const double> x, std::size_t n);
VectorD diff_y(std::span<const double> x, std::size_t n);
VectorD diff_x_t(std::span<const double> y, std::size_t n);
VectorD diff_y_t(std::span<const double> y, std::size_t n);

// P = n(n-1), the length of each difference block.
constexpr std::size_t diff_rows(std::size_t n) noexcept
{
    return n == 0 ? 0 : n * (n - 1);
}

// Image side of an operator with N = n^2 columns; throws when N is not a
// perfect square.
std::size_t image_side(std::size_t cols);

//
// A_hat = [A; lambda_x (L (x) I); lambda_y (I (x) L)], T = M + 2P rows.
// Holds a reference to the forward operator.
//
template <LinearOperator Op>
class AugmentedOp {
public:
    AugmentedOp(const Op& a, double lambda_x, double lambda_y)
        : a_(&a)
        , n_(image_side(a.cols()))
        , lambda_x_(lambda_x)
        , lambda_y_(lambda_y)
    {
    }

    std::size_t rows() const noexcept { return a_->rows() + 2 * diff_rows(n_); }
    std::size_t cols() const noexcept { return a_->cols(); }
    std::size_t side() const noexcept { return n_; }

    VectorD apply(std::span<const double> x, FlopCounter* flops = nullptr) const
    {
        if (x.size() != cols())
            detail::fail_dims("AugmentedOp::apply", "length mismatch");
        VectorD out = a_->apply(x, flops);
        out.reserve(rows());
        for (double v : diff_x(x, n_))
            out.push_back(lambda_x_ * v);
        for (double v : diff_y(x, n_))
            out.push_back(lambda_y_ * v);
        return out;
    }

    VectorD apply_t(std::span<const double> y, FlopCounter* flops = nullptr) const
    {
        if (y.size() != rows())
            detail::fail_dims("AugmentedOp::apply_t", "length mismatch");
        const std::size_t m = a_->rows(), p = diff_rows(n_);
        VectorD out = a_->apply_t(y.first(m), flops);
        axpy(lambda_x_, std::span<const double>(diff_x_t(y.subspan(m, p), n_)), std::span<double>(out));
        axpy(lambda_y_, std::span<const double>(diff_y_t(y.subspan(m + p, p), n_)), std::span<double>(out));
        return out;
    }

private:
    const Op* a_;
    std::size_t n_;
    double lambda_x_, lambda_y_;
};

// b_hat = [b; lambda_x (dx - gx); lambda_y (dy - gy)]
VectorD aug_rhs(std::span<const double> b, std::span<const double> dx, std::span<const double> dy,
                std::span<const double> gx, std::span<const double> gy, double lambda_x, double lambda_y);

} // namespace kpsb
