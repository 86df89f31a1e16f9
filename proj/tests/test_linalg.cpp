#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kpsb/linalg.hpp"
#include "test_util.hpp"

using namespace kpsb;
using testutil::max_abs_diff;

TEST_CASE("vec stacks columns")
{
    const MatrixD m{{1, 3}, {2, 4}};
    CHECK(vec(m) == VectorD{1, 2, 3, 4});
    CHECK(vec(MatrixD{{7}}) == VectorD{7});
}

TEST_CASE("array unstacks columns")
{
    const VectorD v{1, 2, 3, 4};
    CHECK(array(std::span<const double>(v), 2, 2) == MatrixD{{1, 3}, {2, 4}});
    const VectorD w{1, 2, 3, 4, 5, 6};
    CHECK(array(std::span<const double>(w), 3, 2) == MatrixD{{1, 4}, {2, 5}, {3, 6}});
    CHECK_THROWS_AS(array(std::span<const double>(w), 4, 2), ValidationError);
}

TEST_CASE("vec and array round trip, norm preserved")
{
    std::mt19937_64 rng(1);
    for (std::size_t r = 1; r <= 5; ++r)
        for (std::size_t c = 1; c <= 5; ++c) {
            const MatrixD m = testutil::random_matrix(r, c, rng);
            const VectorD v = vec(m);
            CHECK(array(std::span<const double>(v), r, c) == m);
            CHECK(vec(array(std::span<const double>(v), r, c)) == v);
            // Same scalars in another order: the norms agree up to summation order.
            std::vector<double> a(v.begin(), v.end()), b(m.values().begin(), m.values().end());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
            CHECK(norm2(std::span<const double>(a)) == norm2(std::span<const double>(b)));
            CHECK(std::abs(norm2(std::span<const double>(v)) - frobenius_norm(m)) <= 4e-16 * frobenius_norm(m));
        }
}

TEST_CASE("matrix products agree with naive loops")
{
    std::mt19937_64 rng(2);
    const MatrixD a = testutil::random_matrix(7, 5, rng);
    const MatrixD b = testutil::random_matrix(5, 4, rng);
    const MatrixD c = testutil::random_matrix(7, 3, rng);
    const VectorD x = testutil::random_vector(5, rng);
    const VectorD y = testutil::random_vector(7, rng);
    CHECK(max_abs_diff(matmul(a, b), testutil::naive_matmul(a, b)) < 1e-14);
    CHECK(max_abs_diff(matmul_tn(a, c), testutil::naive_matmul(testutil::naive_transpose(a), c)) < 1e-14);
    CHECK(max_abs_diff(matvec(a, std::span<const double>(x)), testutil::naive_matvec(a, x)) < 1e-14);
    CHECK(max_abs_diff(matvec_t(a, std::span<const double>(y)), testutil::naive_matvec(testutil::naive_transpose(a), y))
          < 1e-14);
    CHECK(max_abs_diff(kron(b, c), testutil::naive_kron(b, c)) == 0.0);
}

TEST_CASE("orthonormalize")
{
    SUBCASE("identity is unchanged")
    {
        CHECK(orthonormalize(MatrixD::identity(3)) == MatrixD::identity(3));
    }
    SUBCASE("column scaling")
    {
        const MatrixD q = orthonormalize(MatrixD{{2, 0}, {0, 3}, {0, 0}});
        CHECK(max_abs_diff(q, MatrixD{{1, 0}, {0, 1}, {0, 0}}) < 1e-15);
    }
    SUBCASE("random 20x5 in both precisions")
    {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 10; ++trial) {
            const MatrixD m = testutil::random_matrix(20, 5, rng);
            const MatrixD q = orthonormalize(m);
            CHECK(testutil::orthogonality_error(q) < 1e-12);
            // span(Q) = span(M): projecting M onto Q reproduces M.
            const MatrixD proj = matmul(q, matmul_tn(q, m));
            CHECK(max_abs_diff(proj, m) < 1e-12);
            const MatrixF qf = orthonormalize(cast<float>(m));
            CHECK(testutil::orthogonality_error(qf) < 1e-5);
        }
    }
    SUBCASE("rank deficiency names the column")
    {
        MatrixD m{{1, 2, 0}, {1, 2, 1}, {0, 0, 1}, {1, 2, 0}};
        try {
            orthonormalize(m);
            FAIL("expected RankDeficientError");
        } catch (const RankDeficientError& e) {
            CHECK(e.column() == 1);
        }
    }
}

TEST_CASE("svd_small")
{
    SUBCASE("diagonal")
    {
        const auto s = svd_small(MatrixD{{3, 0, 0}, {0, 1, 0}, {0, 0, 2}});
        CHECK(max_abs_diff(s.sigma, VectorD{3, 2, 1}) < 1e-15);
    }
    SUBCASE("zero")
    {
        const auto s = svd_small(MatrixD(2, 2));
        CHECK(s.sigma == VectorD{0, 0});
        CHECK(testutil::orthogonality_error(s.u) < 1e-14);
        CHECK(testutil::orthogonality_error(s.v) < 1e-14);
    }
    SUBCASE("random 8x6 reconstruction")
    {
        std::mt19937_64 rng(4);
        const MatrixD m = testutil::random_matrix(8, 6, rng);
        const auto s = svd_small(m);
        CHECK(testutil::frob(s.reconstruct() - m) / testutil::frob(m) < 1e-12);
    }
    SUBCASE("prescribed spectra up to 64x64, both orientations")
    {
        std::mt19937_64 rng(5);
        for (std::size_t n : {1u, 2u, 5u, 17u, 40u, 64u}) {
            for (bool wide : {false, true}) {
                const std::size_t r = wide ? n : n + 3, c = wide ? n + 3 : n;
                VectorD sig(n);
                for (std::size_t i = 0; i < n; ++i)
                    sig[i] = std::pow(0.8, double(i)) * (1 + 0.01 * double(i % 3));
                std::sort(sig.rbegin(), sig.rend());
                const MatrixD m = testutil::with_spectrum(r, c, sig, rng);
                const auto s = svd_small(m);
                REQUIRE(s.rank() == n);
                CHECK(max_abs_diff(s.sigma, sig) < 1e-12);
                CHECK(std::is_sorted(s.sigma.rbegin(), s.sigma.rend()));
                CHECK(testutil::frob(s.reconstruct() - m) / testutil::frob(m) < 1e-12);
                CHECK(testutil::orthogonality_error(s.u) < 1e-12);
                CHECK(testutil::orthogonality_error(s.v) < 1e-12);
            }
        }
    }
    SUBCASE("rank-deficient input still yields orthonormal factors")
    {
        const MatrixD m{{1, 2, 3}, {2, 4, 6}, {0, 0, 0}, {1, 2, 3}};
        const auto s = svd_small(m);
        CHECK(s.sigma[1] < 1e-14);
        CHECK(testutil::orthogonality_error(s.u) < 1e-13);
        CHECK(testutil::orthogonality_error(s.v) < 1e-13);
        CHECK(testutil::frob(s.reconstruct() - m) < 1e-13);
    }
    SUBCASE("large matrix of low rank converges")
    {
        std::mt19937_64 rng(8);
        const MatrixD m = testutil::with_spectrum(120, 100, VectorD{4, 2, 1}, rng);
        const auto s = svd_small(m);
        CHECK(std::abs(s.sigma[0] - 4) < 1e-13);
        CHECK(std::abs(s.sigma[2] - 1) < 1e-13);
        CHECK(s.sigma[3] < 1e-12);
        CHECK(testutil::orthogonality_error(s.u) < 1e-12);
        CHECK(testutil::orthogonality_error(s.v) < 1e-12);
        CHECK(testutil::frob(s.reconstruct() - m) < 1e-12 * testutil::frob(m));
    }
    SUBCASE("single precision")
    {
        std::mt19937_64 rng(6);
        const MatrixD m = testutil::random_matrix(12, 9, rng);
        const auto sd = svd_small(m);
        const auto sf = svd_small(cast<float>(m));
        for (std::size_t i = 0; i < sd.rank(); ++i)
            CHECK(std::abs(double(sf.sigma[i]) - sd.sigma[i]) < 1e-5 * sd.sigma[0]);
    }
    SUBCASE("size bound")
    {
        SvdOptions opts;
        opts.max_min_dim = 4;
        CHECK_THROWS_AS(svd_small(MatrixD(5, 5), opts), ValidationError);
    }
}

TEST_CASE("cast")
{
    const double pi = std::numbers::pi;
    const float pf = cast<float>(std::span<const double>(&pi, 1))[0];
    CHECK(std::abs(double(pf) - pi) <= std::ldexp(1.0, -23) * pi);

    std::mt19937_64 rng(7);
    const MatrixF f = cast<float>(testutil::random_matrix(4, 4, rng));
    CHECK(cast<float>(cast<double>(f)) == f);

    const double big = 1e39;
    CHECK(std::isinf(cast<float>(std::span<const double>(&big, 1))[0]));
}

TEST_CASE("gaussian sampling is seeded")
{
    CHECK(gaussian_vector<double>(50, 9) == gaussian_vector<double>(50, 9));
    CHECK(gaussian_vector<double>(50, 9) != gaussian_vector<double>(50, 10));
    const VectorD d = gaussian_vector<double>(20, 11);
    const VectorF f = gaussian_vector<float>(20, 11);
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(f[i] == static_cast<float>(d[i]));
    const VectorD big = gaussian_vector<double>(20000, 12);
    double mean = 0, var = 0;
    for (double v : big)
        mean += v;
    mean /= double(big.size());
    for (double v : big)
        var += (v - mean) * (v - mean);
    var /= double(big.size());
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1) < 0.05);
}
