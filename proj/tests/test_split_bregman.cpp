#include <doctest.h>

#include <cmath>

#include "kpsb/blur.hpp"
#include "kpsb/split_bregman.hpp"
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

// Reference iteration on explicit matrices. Each x-update solves the normal
// equations of the stacked system directly.
VectorD reference_sb(const MatrixD& a, const VectorD& b, double lambda, double beta, bool iso, int iters)
{
    const std::size_t nn = a.cols(), n = static_cast<std::size_t>(std::lround(std::sqrt(double(nn))));
    const MatrixD l = diff_matrix(n), id = MatrixD::identity(n);
    const MatrixD lx = testutil::naive_kron(l, id), ly = testutil::naive_kron(id, l);
    const std::size_t p = lx.rows();
    const double gamma = lambda * lambda / beta, v = 1 / gamma;

    MatrixD big(a.rows() + 2 * p, nn);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < nn; ++j)
            big(i, j) = a(i, j);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < nn; ++j) {
            big(a.rows() + i, j) = lambda * lx(i, j);
            big(a.rows() + p + i, j) = lambda * ly(i, j);
        }

    VectorD x = b, dx(p), dy(p), gx(p), gy(p);
    for (int it = 0; it < iters; ++it) {
        VectorD rhs = b;
        for (std::size_t i = 0; i < p; ++i)
            rhs.push_back(lambda * (dx[i] - gx[i]));
        for (std::size_t i = 0; i < p; ++i)
            rhs.push_back(lambda * (dy[i] - gy[i]));
        x = testutil::normal_equations(big, rhs);
        const VectorD ux = testutil::naive_matvec(lx, x), uy = testutil::naive_matvec(ly, x);
        for (std::size_t i = 0; i < p; ++i) {
            const double cx = ux[i] + gx[i], cy = uy[i] + gy[i];
            if (iso) {
                const double s = std::sqrt(cx * cx + cy * cy);
                const double f = s > v ? (s - v) / s : 0.0;
                dx[i] = cx * f;
                dy[i] = cy * f;
            } else {
                dx[i] = std::abs(cx) > v ? cx - std::copysign(v, cx) : 0.0;
                dy[i] = std::abs(cy) > v ? cy - std::copysign(v, cy) : 0.0;
            }
            gx[i] = cx - dx[i];
            gy[i] = cy - dy[i];
        }
    }
    return x;
}

} // namespace

TEST_CASE("shrinkage by hand")
{
    CHECK(shrink(3, 1) == 2);
    CHECK(shrink(-3, 1) == -2);
    CHECK(shrink(0.5, 1) == 0);
    CHECK(shrink(-0.5, 1) == 0);
    CHECK(shrink(1, 1) == 0);
    CHECK(shrink(0, 0) == 0);
    CHECK(shrink(2.5, 0) == 2.5);
}

TEST_CASE("shrinkage properties")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5, 5), uv(0, 3);
    for (int i = 0; i < 1000; ++i) {
        const double w = u(rng), v = uv(rng), s = shrink(w, v);
        CHECK(std::abs(s) <= std::abs(w));
        CHECK(std::abs(w - s) <= v + 1e-15);
        CHECK((s == 0 || (s > 0) == (w > 0)));
        CHECK(shrink(-w, v) == -s);
        // Proximal optimality: s minimizes |d| + (d - w)^2 / (2v).
        auto obj = [&](double d) { return std::abs(d) + (d - w) * (d - w) / (2 * v); };
        CHECK(obj(s) <= obj(s + 1e-3) + 1e-12);
        CHECK(obj(s) <= obj(s - 1e-3) + 1e-12);
    }
}

TEST_CASE("anisotropic update")
{
    const DPair d = update_d_aniso(VectorD{3, -0.2, 0}, VectorD{-1, 4, 0.5}, 1.0, 0.5);
    CHECK(d.dx == VectorD{2, 0, 0});
    CHECK(d.dy == VectorD{0, 2, 0});
    CHECK_THROWS_AS(update_d_aniso(VectorD{1}, VectorD{1}, 0.0, 1.0), ValidationError);
}

TEST_CASE("isotropic update")
{
    // s = 5, threshold 1: factor 4/5.
    const DPair d = update_d_iso(VectorD{3, 0, 0.3}, VectorD{4, 0, 0.4}, 1.0, 1.0);
    CHECK(d.dx[0] == doctest::Approx(2.4));
    CHECK(d.dy[0] == doctest::Approx(3.2));
    CHECK(d.dx[1] == 0);
    CHECK(d.dy[1] == 0);
    CHECK(d.dx[2] == 0);
    CHECK(d.dy[2] == 0);
    // Components along one axis reduce to the scalar shrinkage.
    const DPair e = update_d_iso(VectorD{-2.5}, VectorD{0}, 2.0, 2.0);
    CHECK(e.dx[0] == doctest::Approx(shrink(-2.5, 0.5)));
    CHECK_THROWS_AS(update_d_iso(VectorD{1, 2}, VectorD{1}, 1, 1), ValidationError);
}

TEST_CASE("Bregman variable update")
{
    const std::size_t n = 3;
    const VectorD x{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const VectorD lx = diff_x(x, n), ly = diff_y(x, n);
    VectorD gx(6, 1.0), gy(6, -1.0);
    update_g(gx, gy, x, lx, ly, n);
    CHECK(gx == VectorD(6, 1.0));
    CHECK(gy == VectorD(6, -1.0));
    VectorD hx(6, 0.0), hy(6, 0.0);
    update_g(hx, hy, x, VectorD(6, 0.0), VectorD(6, 0.0), n);
    CHECK(hx == lx);
    CHECK(hy == ly);
    CHECK_THROWS_AS(update_g(hx, hy, x, VectorD(5), VectorD(6), n), ValidationError);
}

TEST_CASE("configuration")
{
    const SbConfig c = SbConfig::from_gamma(TvVariant::Iso, 0.5, 2.0);
    CHECK(c.beta_x == doctest::Approx(0.125));
    CHECK(c.gamma_x() == doctest::Approx(2.0));
    CHECK(c.gamma_y() == doctest::Approx(2.0));
    SbConfig iso = SbConfig::uniform(TvVariant::Iso, 1.0, 0.5);
    iso.beta_y = 100;
    CHECK(iso.gamma_y() == doctest::Approx(2.0));
    CHECK(parse_variant("aniso") == TvVariant::Aniso);
    CHECK(std::string(to_string(TvVariant::Iso)) == "iso");
    CHECK_THROWS_AS(parse_variant("tv"), ValidationError);
    CHECK_THROWS_AS(SbConfig::uniform(TvVariant::Aniso, 0.0, 1.0).validate(), ValidationError);
    CHECK_THROWS_AS(SbConfig::uniform(TvVariant::Aniso, 1.0, -1.0).validate(), ValidationError);
    CHECK_THROWS_AS(SbConfig::from_gamma(TvVariant::Aniso, 1.0, 0.0), ValidationError);
}

TEST_CASE("matches the dense reference iteration")
{
    std::mt19937_64 rng(2);
    const std::size_t n = 5;
    const Psf psf = synth_speckle_psf(3, 0.5, 9);
    const MatrixD a = build_blur_matrix(psf, n, Boundary::Reflexive);
    const VectorD truth = vec(phantom(n));
    const VectorD b = add_noise(testutil::naive_matvec(a, truth), {0.05, 4}).b;
    for (bool iso : {false, true}) {
        SbConfig cfg = SbConfig::uniform(iso ? TvVariant::Iso : TvVariant::Aniso, 0.3, 0.02);
        cfg.tau_sb = 0;
        cfg.l_max = 4;
        cfg.cgls = {500, 1e-13};
        const SbResult r = sb_run(DenseOperator(a), b, cfg);
        CHECK(r.state.ell == 4);
        CHECK_FALSE(r.converged);
        CHECK(r.rc_sb.size() == 4);
        const VectorD ref = reference_sb(a, b, 0.3, 0.02, iso, 4);
        CHECK(testutil::max_abs_diff(r.x(), ref) < 1e-8);
    }
}

TEST_CASE("identity operator")
{
    // Constant data is a fixed point: no edges, so d = g = 0 and x = b.
    const VectorD b(16, 0.25);
    const SbResult r = sb_run(DenseOperator(MatrixD::identity(16)), b, SbConfig::uniform(TvVariant::Aniso, 1, 1));
    CHECK(r.converged);
    CHECK(r.state.ell == 1);
    CHECK(testutil::max_abs_diff(r.x(), b) < 1e-14);
    CHECK(r.rc_sb[0] < 1e-14);
}

TEST_CASE("history with a known truth")
{
    const std::size_t n = 8;
    const Psf psf = synth_speckle_psf(3, 0.7, 2);
    const MatrixD a = build_blur_matrix(psf, n, Boundary::Reflexive);
    const VectorD truth = vec(phantom(n));
    const VectorD b = add_noise(testutil::naive_matvec(a, truth), {0.05, 1}).b;
    SbConfig cfg = SbConfig::uniform(TvVariant::Aniso, 0.2, 0.01);
    cfg.l_max = 6;
    const SbResult r = sb_run(DenseOperator(a), b, cfg, std::span<const double>(truth));
    REQUIRE(r.re.size() == r.state.ell);
    CHECK(r.isnr_db.size() == r.state.ell);
    std::size_t sum = 0;
    for (auto i : r.cgls_iters)
        sum += i;
    CHECK(sum == r.iota_total);
    CHECK(r.flops.dense_apply > 0);
    CHECK(r.flops.kp_apply == 0);
    CHECK(r.re.back() == doctest::Approx(relative_error(r.x(), truth)));
    CHECK(r.isnr_db.back() == doctest::Approx(isnr_db(r.x(), b, truth)));
}

TEST_CASE("run validation")
{
    const DenseOperator a(MatrixD::identity(9));
    const SbConfig cfg = SbConfig::uniform(TvVariant::Aniso, 1, 1);
    CHECK_THROWS_AS(sb_run(a, VectorD(8), cfg), ValidationError);
    CHECK_THROWS_AS(sb_run(DenseOperator(MatrixD(12, 9)), VectorD(12), cfg), ValidationError);
    CHECK_THROWS_AS(sb_run(DenseOperator(MatrixD::identity(8)), VectorD(8, 1.0), cfg), ValidationError);
    const VectorD t(4);
    CHECK_THROWS_AS(sb_run(a, VectorD(9, 1.0), cfg, std::span<const double>(t)), ValidationError);
}
