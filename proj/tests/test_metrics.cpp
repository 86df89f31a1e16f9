#include <doctest.h>

#include <cmath>
#include <limits>

#include "kpsb/kronecker.hpp"
#include "kpsb/metrics.hpp"
#include "test_util.hpp"

using namespace kpsb;

TEST_CASE("signal-to-noise ratio")
{
    const VectorD t{3, 4};
    CHECK(snr_db(t, VectorD{3, 4.5}) == doctest::Approx(20 * std::log10(5 / 0.5)));
    CHECK(snr_db(t, VectorD{0, 0}) == doctest::Approx(0.0));
    CHECK(std::isinf(snr_db(t, t)));
    CHECK(snr_db(t, t) > 0);
    CHECK_THROWS_AS(snr_db(t, VectorD{1}), ValidationError);
}

TEST_CASE("relative error and change")
{
    CHECK(relative_error(VectorD{3, 5}, VectorD{3, 4}) == doctest::Approx(0.2));
    CHECK(relative_error(VectorD{1, 1}, VectorD{1, 1}) == 0.0);
    CHECK_THROWS_AS(relative_error(VectorD{1, 1}, VectorD{0, 0}), ValidationError);
    CHECK(relative_change(VectorD{0, 2}, VectorD{0, 1}) == 1.0);
    CHECK_THROWS_AS(relative_change(VectorD{1}, VectorD{0}), ValidationError);
}

TEST_CASE("improvement in SNR")
{
    const VectorD truth{1, 1}, b{1, 3}, x{1, 2};
    CHECK(isnr_db(x, b, truth) == doctest::Approx(20 * std::log10(2.0)));
    CHECK(isnr_db(b, b, truth) == 0.0);
    CHECK(isnr_db(VectorD{1, 5}, b, truth) < 0);
    CHECK(std::isinf(isnr_db(truth, b, truth)));
    CHECK_THROWS_AS(isnr_db(truth, truth, truth), ValidationError);
}

TEST_CASE("speedup predictions")
{
    CostModel cm;
    cm.M = cm.N = cm.P = 10000;
    cm.T = cm.N + 2 * cm.P;
    cm.m1 = cm.m2 = cm.n1 = cm.n2 = 100;
    cm.k = 5;
    cm.k_p = 7;
    cm.rho = 1;
    cm.iota_total = 464;
    const SpeedupPrediction s = predict_speedups(cm);
    CHECK(s.sb_speedup == 30.0);
    CHECK(s.alg_speedup == doctest::Approx(3.0 * 464 / 7).epsilon(1e-14));
    CHECK(s.alg_speedup_note == doctest::Approx(1.5 * 464 / 7).epsilon(1e-14));
    CHECK(std::lround(s.alg_speedup_note) == 99);

    cm.rho = 2;
    CHECK(predict_speedups(cm).alg_speedup == doctest::Approx(1.5 * 464 / 7).epsilon(1e-14));

    // k n1 = (N + 2P) / 2 is the break-even point.
    cm.k = 150;
    cm.k_p = 150;
    CHECK(predict_speedups(cm).sb_speedup == 1.0);
}

TEST_CASE("SB speedup decreases with k")
{
    double prev = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 1; k <= 64; ++k) {
        const double s = predict_speedups(CostModel::square(64, k, 2, 1, 100)).sb_speedup;
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("cost model validation")
{
    const CostModel sq = CostModel::square(8, 3, 2, 2, 10);
    CHECK(sq.N == 64);
    CHECK(sq.P == 56);
    CHECK(sq.T == 64 + 112);
    CHECK(sq.k_p == 5);
    CostModel bad = sq;
    bad.rho = 3;
    CHECK_THROWS_AS(predict_speedups(bad), ValidationError);
    bad = sq;
    bad.k = 0;
    CHECK_THROWS_AS(predict_speedups(bad), ValidationError);
    bad = sq;
    bad.T = 1;
    CHECK_THROWS_AS(predict_speedups(bad), ValidationError);
}

TEST_CASE("flop counters are per instance")
{
    std::mt19937_64 rng(1);
    const KroneckerSum op(BlockScheme{3, 4, 2, 5},
                          {{testutil::random_matrix(3, 2, rng), testutil::random_matrix(4, 5, rng)}});
    FlopCounter a, b;
    const VectorD x(10, 1.0);
    op.apply(x, &a);
    op.apply(x, &a);
    op.apply_t(VectorD(12, 1.0), &b);
    CHECK(a.kp_apply == 2 * op.flops_per_apply());
    CHECK(b.kp_apply == op.flops_per_apply());
    // 2 (m2 N + M n1) k
    CHECK(op.flops_per_apply() == 2 * (4 * 10 + 12 * 2) * 1);
    a += b;
    CHECK(a.kp_apply == 3 * op.flops_per_apply());
    CHECK(a.dense_apply == 0);
}
