#include "kpsb/linalg.hpp"

#include <numeric>
#include <random>

namespace kpsb {

template <Real T>
Vector<T> matvec(const Matrix<T>& a, std::span<const T> x)
{
    if (x.size() != a.cols())
        detail::fail_dims("matvec", "length mismatch");
    Vector<T> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        y[i] = dot(a.row(i), x);
    return y;
}

template <Real T>
Vector<T> matvec_t(const Matrix<T>& a, std::span<const T> x)
{
    if (x.size() != a.rows())
        detail::fail_dims("matvec_t", "length mismatch");
    Vector<T> y(a.cols(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        axpy(x[i], a.row(i), std::span<T>(y));
    return y;
}

template <Real T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.cols() != b.rows())
        detail::fail_dims("matmul", "inner dimension mismatch");
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t l = 0; l < a.cols(); ++l)
            axpy(a(i, l), b.row(l), ci);
    }
    return c;
}

template <Real T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.rows() != b.rows())
        detail::fail_dims("matmul_tn", "inner dimension mismatch");
    Matrix<T> c(a.cols(), b.cols());
    for (std::size_t l = 0; l < a.rows(); ++l) {
        const auto bl = b.row(l);
        for (std::size_t i = 0; i < a.cols(); ++i)
            axpy(a(l, i), bl, c.row(i));
    }
    return c;
}

template <Real T>
Matrix<T> kron(const Matrix<T>& b, const Matrix<T>& c)
{
    Matrix<T> k(b.rows() * c.rows(), b.cols() * c.cols());
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            for (std::size_t r = 0; r < c.rows(); ++r)
                for (std::size_t s = 0; s < c.cols(); ++s)
                    k(i * c.rows() + r, j * c.cols() + s) = b(i, j) * c(r, s);
    return k;
}

namespace {

// Column-major working copy: one contiguous vector per column.
template <Real T>
std::vector<Vector<T>> columns_of(const Matrix<T>& m)
{
    std::vector<Vector<T>> cols(m.cols(), Vector<T>(m.rows()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            cols[j][i] = m(i, j);
    return cols;
}

template <Real T>
Matrix<T> from_columns(const std::vector<Vector<T>>& cols, std::size_t rows)
{
    Matrix<T> m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        m.set_col(j, cols[j]);
    return m;
}

// Project q out of v twice (classical "twice is enough" with MGS sweeps).
template <Real T>
void project_out(std::span<T> v, const std::vector<Vector<T>>& basis, std::size_t count)
{
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < count; ++i) {
            const std::span<const T> qi = basis[i];
            axpy(-dot(qi, std::span<const T>(v)), qi, v);
        }
}

} // namespace

template <Real T>
Matrix<T> orthonormalize(const Matrix<T>& m)
{
    if (m.rows() < m.cols())
        detail::fail_dims("orthonormalize", "need rows >= cols");
    auto cols = columns_of(m);

    T max_norm = 0;
    for (const auto& c : cols)
        max_norm = std::max(max_norm, norm2(std::span<const T>(c)));
    const T drop = std::numeric_limits<T>::epsilon() * std::sqrt(static_cast<T>(m.rows())) * max_norm;

    for (std::size_t j = 0; j < cols.size(); ++j) {
        std::span<T> v = cols[j];
        project_out(v, cols, j);
        const T nrm = norm2(std::span<const T>(v));
        if (!(nrm > drop))
            throw RankDeficientError(j, "orthonormalize: column " + std::to_string(j)
                                            + " is numerically dependent on the previous columns");
        scale(T(1) / nrm, v);
    }
    return from_columns(cols, m.rows());
}

template <Real T>
Matrix<T> TruncatedSvd<T>::reconstruct() const
{
    Matrix<T> us = u;
    for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t j = 0; j < rank(); ++j)
            us(i, j) *= sigma[j];
    Matrix<T> out(u.rows(), v.rows());
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            out(i, j) = dot<T>(us.row(i), v.row(j));
    return out;
}

template <Real T>
TruncatedSvd<T> svd_small(const Matrix<T>& m, const SvdOptions& opts)
{
    const bool wide = m.rows() < m.cols();
    const Matrix<T>& a = m;
    // Work on the tall orientation; swap the factors at the end if needed.
    auto w = wide ? columns_of(a.transposed()) : columns_of(a);
    const std::size_t len = wide ? m.cols() : m.rows();
    const std::size_t n = w.size();
    if (n > opts.max_min_dim)
        detail::fail_dims("svd_small", "min(rows, cols) = " + std::to_string(n) + " exceeds the small-problem bound "
                                           + std::to_string(opts.max_min_dim));

    std::vector<Vector<T>> vcols(n, Vector<T>(n, T(0)));
    for (std::size_t i = 0; i < n; ++i)
        vcols[i][i] = T(1);

    const T eps = std::numeric_limits<T>::epsilon();
    const T tol = eps * std::max(T(1), std::sqrt(static_cast<T>(len)));
    // Columns below this squared norm are rounding noise of a rank-deficient
    // input; rotating them against each other never settles.
    T fro2 = 0;
    for (const auto& c : w)
        fro2 += dot<T>(c, c);
    const T noise = eps * std::sqrt(static_cast<T>(len));
    const T zero2 = noise * noise * fro2;

    int sweep = 0;
    bool rotated = true;
    while (rotated) {
        if (sweep == opts.max_sweeps)
            throw NumericalError("svd_small: one-sided Jacobi did not converge after " + std::to_string(sweep)
                                 + " sweeps");
        ++sweep;
        rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                std::span<T> wp = w[p], wq = w[q];
                const T alpha = dot<T>(wp, wp);
                const T beta = dot<T>(wq, wq);
                const T gamma = dot<T>(wp, wq);
                if (alpha <= zero2 || beta <= zero2 || std::abs(gamma) <= tol * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const T zeta = (beta - alpha) / (T(2) * gamma);
                const T t = std::copysign(T(1), zeta) / (std::abs(zeta) + std::sqrt(T(1) + zeta * zeta));
                const T c = T(1) / std::sqrt(T(1) + t * t);
                const T s = c * t;
                for (std::size_t i = 0; i < len; ++i) {
                    const T x = wp[i], y = wq[i];
                    wp[i] = c * x - s * y;
                    wq[i] = s * x + c * y;
                }
                std::span<T> vp = vcols[p], vq = vcols[q];
                for (std::size_t i = 0; i < n; ++i) {
                    const T x = vp[i], y = vq[i];
                    vp[i] = c * x - s * y;
                    vq[i] = s * x + c * y;
                }
            }
        }
    }

    Vector<T> sig(n);
    for (std::size_t j = 0; j < n; ++j)
        sig[j] = norm2(std::span<const T>(w[j]));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    const T smax = n ? sig[order[0]] : T(0);
    const T negligible = smax * eps * static_cast<T>(len);
    std::vector<Vector<T>> ucols;
    ucols.reserve(n);
    std::size_t next_unit = 0;
    TruncatedSvd<T> out;
    out.sigma.resize(n);
    std::vector<Vector<T>> vsorted;
    vsorted.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t j = order[r];
        out.sigma[r] = sig[j];
        vsorted.push_back(vcols[j]);
        Vector<T> u = w[j];
        if (sig[j] > negligible && sig[j] > T(0)) {
            scale(T(1) / sig[j], std::span<T>(u));
            ucols.push_back(std::move(u));
            continue;
        }
        // Direction is noise: complete with the next unit vector that survives
        // projection against the columns already chosen.
        for (;;) {
            if (next_unit >= len)
                throw NumericalError("svd_small: failed to complete the left singular basis");
            Vector<T> e(len, T(0));
            e[next_unit++] = T(1);
            project_out(std::span<T>(e), ucols, ucols.size());
            const T nrm = norm2(std::span<const T>(e));
            if (nrm > T(0.5)) {
                scale(T(1) / nrm, std::span<T>(e));
                ucols.push_back(std::move(e));
                break;
            }
        }
    }

    Matrix<T> umat = from_columns(ucols, len);
    Matrix<T> vmat = from_columns(vsorted, n);
    if (wide) {
        out.u = std::move(vmat);
        out.v = std::move(umat);
    } else {
        out.u = std::move(umat);
        out.v = std::move(vmat);
    }
    return out;
}

template <Real T>
Vector<T> gaussian_vector(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector<T> v(n);
    for (auto& x : v)
        x = static_cast<T>(dist(gen));
    return v;
}

template <Real T>
Matrix<T> gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    return Matrix<T>(rows, cols, gaussian_vector<T>(rows * cols, seed));
}

#define KPSB_INSTANTIATE(T)                                                                                           \
    template Vector<T> matvec(const Matrix<T>&, std::span<const T>);                                                  \
    template Vector<T> matvec_t(const Matrix<T>&, std::span<const T>);                                                \
    template Matrix<T> matmul(const Matrix<T>&, const Matrix<T>&);                                                    \
    template Matrix<T> matmul_tn(const Matrix<T>&, const Matrix<T>&);                                                 \
    template Matrix<T> kron(const Matrix<T>&, const Matrix<T>&);                                                      \
    template Matrix<T> orthonormalize(const Matrix<T>&);                                                              \
    template struct TruncatedSvd<T>;                                                                                  \
    template TruncatedSvd<T> svd_small(const Matrix<T>&, const SvdOptions&);                                          \
    template Vector<T> gaussian_vector<T>(std::size_t, std::uint64_t);                                                \
    template Matrix<T> gaussian_matrix<T>(std::size_t, std::size_t, std::uint64_t);

KPSB_INSTANTIATE(float)
KPSB_INSTANTIATE(double)

#undef KPSB_INSTANTIATE

} // namespace kpsb
