#pragma once

#include <concepts>
#include <memory>
#include <span>

#include "kpsb/flops.hpp"
#include "kpsb/linalg.hpp"

namespace kpsb {

// Forward/transpose pair in double precision. KroneckerSum, DenseOperator
// and AugmentedOp model it.
template <class Op>
concept LinearOperator = requires(const Op& op, std::span<const double> v, FlopCounter* f) {
    { op.rows() } -> std::convertible_to<std::size_t>;
    { op.cols() } -> std::convertible_to<std::size_t>;
    { op.apply(v, f) } -> std::same_as<VectorD>;
    { op.apply_t(v, f) } -> std::same_as<VectorD>;
};

// Explicit matrix; each product counts 2 * rows * cols flops.
class DenseOperator {
public:
    explicit DenseOperator(MatrixD a)
        : a_(std::make_shared<const MatrixD>(std::move(a)))
    {
    }
    explicit DenseOperator(std::shared_ptr<const MatrixD> a)
        : a_(std::move(a))
    {
    }

    std::size_t rows() const noexcept { return a_->rows(); }
    std::size_t cols() const noexcept { return a_->cols(); }
    const MatrixD& matrix() const noexcept { return *a_; }

    VectorD apply(std::span<const double> x, FlopCounter* flops = nullptr) const
    {
        if (x.size() != cols())
            detail::fail_dims("DenseOperator::apply", "length mismatch");
        count(flops);
        return matvec(*a_, x);
    }

    VectorD apply_t(std::span<const double> y, FlopCounter* flops = nullptr) const
    {
        if (y.size() != rows())
            detail::fail_dims("DenseOperator::apply_t", "length mismatch");
        count(flops);
        return matvec_t(*a_, y);
    }

private:
    void count(FlopCounter* flops) const
    {
        if (flops)
            flops->dense_apply += 2 * static_cast<std::uint64_t>(rows()) * cols();
    }

    std::shared_ptr<const MatrixD> a_;
};

} // namespace kpsb
