#include "kpsb/rearrange.hpp"

#include "kpsb/error.hpp"

namespace kpsb {

std::string BlockScheme::describe() const
{
    return "(m1=" + std::to_string(m1) + ", m2=" + std::to_string(m2) + ", n1=" + std::to_string(n1)
           + ", n2=" + std::to_string(n2) + ")";
}

template <Real T>
Matrix<T> rearrange(const Matrix<T>& a, const BlockScheme& s)
{
    if (a.rows() != s.rows() || a.cols() != s.cols())
        detail::fail_dims("rearrange", "matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols())
                                           + " but scheme " + s.describe() + " expects " + std::to_string(s.rows())
                                           + "x" + std::to_string(s.cols()));
    Matrix<T> r(s.rearranged_rows(), s.rearranged_cols());
    // A(i*m2 + p, j*n2 + q) -> R(j*m1 + i, p + q*m2)
    for (std::size_t i = 0; i < s.m1; ++i)
        for (std::size_t p = 0; p < s.m2; ++p) {
            const auto arow = a.row(i * s.m2 + p);
            for (std::size_t j = 0; j < s.n1; ++j) {
                auto rrow = r.row(j * s.m1 + i);
                for (std::size_t q = 0; q < s.n2; ++q)
                    rrow[p + q * s.m2] = arow[j * s.n2 + q];
            }
        }
    return r;
}

template <Real T>
Matrix<T> inverse_rearrange(const Matrix<T>& r, const BlockScheme& s)
{
    if (r.rows() != s.rearranged_rows() || r.cols() != s.rearranged_cols())
        detail::fail_dims("inverse_rearrange", "matrix does not match scheme " + s.describe());
    Matrix<T> a(s.rows(), s.cols());
    for (std::size_t i = 0; i < s.m1; ++i)
        for (std::size_t p = 0; p < s.m2; ++p) {
            auto arow = a.row(i * s.m2 + p);
            for (std::size_t j = 0; j < s.n1; ++j) {
                const auto rrow = r.row(j * s.m1 + i);
                for (std::size_t q = 0; q < s.n2; ++q)
                    arow[j * s.n2 + q] = rrow[p + q * s.m2];
            }
        }
    return a;
}

template Matrix<float> rearrange(const Matrix<float>&, const BlockScheme&);
template Matrix<double> rearrange(const Matrix<double>&, const BlockScheme&);
template Matrix<float> inverse_rearrange(const Matrix<float>&, const BlockScheme&);
template Matrix<double> inverse_rearrange(const Matrix<double>&, const BlockScheme&);

} // namespace kpsb
