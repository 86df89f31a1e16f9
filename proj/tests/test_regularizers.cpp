#include <doctest.h>

#include "kpsb/kronecker.hpp"
#include "kpsb/regularizers.hpp"
#include "test_util.hpp"

using namespace kpsb;

namespace {

MatrixD diff_matrix(std::size_t n)
{
    MatrixD l(n - 1, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        l(i, i) = 0.5;
        l(i, i + 1) = -0.5;
    }
    return l;
}

MatrixD stack(const std::vector<MatrixD>& parts, const std::vector<double>& w)
{
    std::size_t rows = 0;
    for (const auto& p : parts)
        rows += p.rows();
    MatrixD out(rows, parts.front().cols());
    std::size_t r0 = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        for (std::size_t i = 0; i < parts[k].rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j)
                out(r0 + i, j) = w[k] * parts[k](i, j);
        r0 += parts[k].rows();
    }
    return out;
}

} // namespace

TEST_CASE("constant images have zero differences")
{
    const VectorD x(36, 3.5);
    CHECK(diff_x(x, 6) == VectorD(30, 0.0));
    CHECK(diff_y(x, 6) == VectorD(30, 0.0));
}

TEST_CASE("two by two by hand")
{
    // X = [1 3; 2 4], vec(X) = [1 2 3 4]
    const VectorD x{1, 2, 3, 4};
    CHECK(diff_x(x, 2) == VectorD{-1, -1});
    CHECK(diff_y(x, 2) == VectorD{-0.5, -0.5});
    CHECK(diff_x_t(VectorD{1, 0}, 2) == VectorD{0.5, 0, -0.5, 0});
    CHECK(diff_y_t(VectorD{0, 1}, 2) == VectorD{0, 0, 0.5, -0.5});
}

TEST_CASE("differences match the Kronecker matrices")
{
    std::mt19937_64 rng(1);
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
        const MatrixD l = diff_matrix(n), id = MatrixD::identity(n);
        const MatrixD lx = testutil::naive_kron(l, id), ly = testutil::naive_kron(id, l);
        const VectorD x = testutil::random_vector(n * n, rng);
        const VectorD y = testutil::random_vector(diff_rows(n), rng);
        CHECK(testutil::max_abs_diff(diff_x(x, n), testutil::naive_matvec(lx, x)) < 1e-15);
        CHECK(testutil::max_abs_diff(diff_y(x, n), testutil::naive_matvec(ly, x)) < 1e-15);
        CHECK(testutil::max_abs_diff(diff_x_t(y, n), testutil::naive_matvec(testutil::naive_transpose(lx), y)) < 1e-15);
        CHECK(testutil::max_abs_diff(diff_y_t(y, n), testutil::naive_matvec(testutil::naive_transpose(ly), y)) < 1e-15);
    }
}

TEST_CASE("difference operators have norm at most one")
{
    std::mt19937_64 rng(2);
    const std::size_t n = 12;
    VectorD x = testutil::random_vector(n * n, rng);
    for (auto [fwd, adj] : {std::pair{&diff_x, &diff_x_t}, std::pair{&diff_y, &diff_y_t}}) {
        double lambda = 0;
        for (int it = 0; it < 300; ++it) {
            VectorD y = adj(fwd(x, n), n);
            lambda = norm2<double>(y) / norm2<double>(x);
            x = y;
            scale(1.0 / norm2<double>(x), std::span<double>(x));
        }
        CHECK(std::sqrt(lambda) <= 1.0 + 1e-12);
        CHECK(std::sqrt(lambda) > 0.95);
    }
}

TEST_CASE("sizes and errors")
{
    CHECK(diff_rows(1) == 0);
    CHECK(diff_rows(64) == 64 * 63);
    CHECK(image_side(4096) == 64);
    CHECK_THROWS_AS(image_side(10), ValidationError);
    CHECK_THROWS_AS(diff_x(VectorD(8), 3), ValidationError);
    CHECK_THROWS_AS(diff_y_t(VectorD(5), 3), ValidationError);
    CHECK_THROWS_AS(diff_x(VectorD(1), 1), ValidationError);
}

TEST_CASE("augmented operator")
{
    std::mt19937_64 rng(3);
    const std::size_t n = 4, nn = n * n;
    const MatrixD l = diff_matrix(n), id = MatrixD::identity(n);
    const MatrixD lx = testutil::naive_kron(l, id), ly = testutil::naive_kron(id, l);

    const MatrixD ad = testutil::random_matrix(nn, nn, rng);
    const DenseOperator dense(ad);
    std::vector<KroneckerTerm> terms{{testutil::random_matrix(n, n, rng), testutil::random_matrix(n, n, rng)},
                                     {testutil::random_matrix(n, n, rng), testutil::random_matrix(n, n, rng)}};
    const KroneckerSum kron_op(BlockScheme::square(n), terms);
    const MatrixD ak = kron_op.materialize();

    const double lx_w = 0.3, ly_w = 0.7;
    auto check_op = [&](const auto& op, const MatrixD& a) {
        const AugmentedOp aug(op, lx_w, ly_w);
        CHECK(aug.rows() == nn + 2 * diff_rows(n));
        CHECK(aug.cols() == nn);
        CHECK(aug.side() == n);
        const MatrixD ahat = stack({a, lx, ly}, {1.0, lx_w, ly_w});
        const VectorD x = testutil::random_vector(nn, rng);
        const VectorD y = testutil::random_vector(aug.rows(), rng);
        CHECK(testutil::max_abs_diff(aug.apply(x), testutil::naive_matvec(ahat, x)) < 1e-12);
        CHECK(testutil::max_abs_diff(aug.apply_t(y), testutil::naive_matvec(testutil::naive_transpose(ahat), y)) <
              1e-12);
        CHECK_THROWS_AS(aug.apply(VectorD(nn + 1)), ValidationError);
        CHECK_THROWS_AS(aug.apply_t(VectorD(nn)), ValidationError);

        const AugmentedOp plain(op, 0.0, 0.0);
        const VectorD px = plain.apply(x);
        CHECK(testutil::max_abs_diff(VectorD(px.begin(), px.begin() + nn), op.apply(x)) == 0.0);
        for (std::size_t i = nn; i < px.size(); ++i)
            CHECK(px[i] == 0.0);
    };
    check_op(dense, ad);
    check_op(kron_op, ak);
}

TEST_CASE("augmented right-hand side")
{
    const VectorD b{1, 2, 3, 4};
    const VectorD dx{1, 2}, dy{3, 4}, gx{0.5, 0.5}, gy{1, -1};
    const VectorD r = aug_rhs(b, dx, dy, gx, gy, 2.0, 10.0);
    CHECK(r == VectorD{1, 2, 3, 4, 1, 3, 20, 50});
    CHECK_THROWS_AS(aug_rhs(b, dx, VectorD{1}, gx, gy, 1, 1), ValidationError);
}
