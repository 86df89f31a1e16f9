#include "kpsb/regularizers.hpp"

#include <cmath>

namespace kpsb {

namespace {

void check_image(const char* where, std::span<const double> x, std::size_t n)
{
    if (n < 2)
        throw ValidationError(std::string(where) + ": image side must be at least 2");
    if (x.size() != n * n)
        detail::fail_dims(where, "length " + std::to_string(x.size()) + " != " + std::to_string(n * n));
}

void check_diff(const char* where, std::span<const double> y, std::size_t n)
{
    if (n < 2)
        throw ValidationError(std::string(where) + ": image side must be at least 2");
    if (y.size() != diff_rows(n))
        detail::fail_dims(where, "length " + std::to_string(y.size()) + " != " + std::to_string(diff_rows(n)));
}

} // namespace

VectorD diff_x(std::span<const double> x, std::size_t n)
{
    check_image("diff_x", x, n);
    VectorD out(diff_rows(n));
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t r = 0; r < n; ++r)
            out[r + n * i] = 0.5 * (x[r + n * i] - x[r + n * (i + 1)]);
    return out;
}

VectorD diff_y(std::span<const double> x, std::size_t n)
{
    check_image("diff_y", x, n);
    VectorD out(diff_rows(n));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i + 1 < n; ++i)
            out[i + (n - 1) * c] = 0.5 * (x[i + n * c] - x[i + 1 + n * c]);
    return out;
}

VectorD diff_x_t(std::span<const double> y, std::size_t n)
{
    check_diff("diff_x_t", y, n);
    VectorD out(n * n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t r = 0; r < n; ++r) {
            const double v = 0.5 * y[r + n * i];
            out[r + n * i] += v;
            out[r + n * (i + 1)] -= v;
        }
    return out;
}

VectorD diff_y_t(std::span<const double> y, std::size_t n)
{
    check_diff("diff_y_t", y, n);
    VectorD out(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double v = 0.5 * y[i + (n - 1) * c];
            out[i + n * c] += v;
            out[i + 1 + n * c] -= v;
        }
    return out;
}

std::size_t image_side(std::size_t cols)
{
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(cols))));
    if (n * n != cols)
        throw ValidationError("operator has " + std::to_string(cols) + " columns, not a square image");
    return n;
}

VectorD aug_rhs(std::span<const double> b, std::span<const double> dx, std::span<const double> dy,
                std::span<const double> gx, std::span<const double> gy, double lambda_x, double lambda_y)
{
    const std::size_t p = dx.size();
    if (dy.size() != p || gx.size() != p || gy.size() != p)
        detail::fail_dims("aug_rhs", "d and g blocks must share one length");
    VectorD out(b.begin(), b.end());
    out.reserve(b.size() + 2 * p);
    for (std::size_t i = 0; i < p; ++i)
        out.push_back(lambda_x * (dx[i] - gx[i]));
    for (std::size_t i = 0; i < p; ++i)
        out.push_back(lambda_y * (dy[i] - gy[i]));
    return out;
}

} // namespace kpsb
