#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kpsb/cgls.hpp"
#include "kpsb/metrics.hpp"
#include "kpsb/regularizers.hpp"

namespace kpsb {

enum class TvVariant { Aniso, Iso };

const char* to_string(TvVariant v);
TvVariant parse_variant(const std::string& s);

struct SbConfig {
    TvVariant variant = TvVariant::Aniso;
    double lambda_x = 0.1;
    double lambda_y = 0.1;
    double beta_x = 0.01;
    double beta_y = 0.01; // the isotropic variant uses beta_x for both directions
    double tau_sb = 1e-3;
    std::size_t l_max = 50;
    CglsConfig cgls;
    // Start each CGLS solve from the previous outer iterate instead of zero.
    bool warm_start = false;

    // lambda_x = lambda_y = lambda, beta_x = beta_y = beta.
    static SbConfig uniform(TvVariant variant, double lambda, double beta);
    // beta = lambda^2 / gamma.
    static SbConfig from_gamma(TvVariant variant, double lambda, double gamma);

    // gamma = lambda^2 / beta (the isotropic variant's gamma-tilde).
    double gamma_x() const { return lambda_x * lambda_x / beta_x; }
    double gamma_y() const { return lambda_y * lambda_y / (variant == TvVariant::Iso ? beta_x : beta_y); }

    void validate() const;
};

// sign(w) max(|w| - v, 0)
double shrink(double w, double v);

struct DPair {
    VectorD dx;
    VectorD dy;
};

// d_i = shrink(c_i, 1/gamma), each direction on its own.
DPair update_d_aniso(std::span<const double> cx, std::span<const double> cy, double gamma_x, double gamma_y);

// d_i = c_i / s_i * max(s_i - 1/gamma, 0), s_i = sqrt(cx_i^2 + cy_i^2);
// s_i == 0 gives d_i = 0. cx and cy are paired by vector index.
DPair update_d_iso(std::span<const double> cx, std::span<const double> cy, double gamma_x, double gamma_y);

// g' = g + L x - d in both directions, in place.
void update_g(std::span<double> gx, std::span<double> gy, std::span<const double> x, std::span<const double> dx,
              std::span<const double> dy, std::size_t n);

struct SbState {
    VectorD x, dx, dy, gx, gy;
    std::size_t ell = 0;
};

struct SbResult {
    SbState state;
    std::vector<double> rc_sb;    // RC_SB per outer iteration
    std::vector<double> re;       // with truth only
    std::vector<double> isnr_db;  // with truth only
    std::vector<std::size_t> cgls_iters;
    std::vector<CglsStatus> cgls_status;
    std::size_t iota_total = 0;
    bool converged = false;
    FlopCounter flops;

    const VectorD& x() const noexcept { return state.x; }
};

//
// Split Bregman TV deblurring: x = b, d = g = 0, then until RC_SB < tau_sb
// or l_max iterations
//
//   x <- argmin ||A_hat x - b_hat(d - g)||   (CGLS)
//   c = L x + g, d <- shrinkage(c), g <- c - d
//
template <LinearOperator Op>
SbResult sb_run(const Op& a, std::span<const double> b, const SbConfig& cfg,
                std::optional<std::span<const double>> truth = std::nullopt)
{
    cfg.validate();
    if (b.size() != a.rows())
        detail::fail_dims("sb_run", "data length " + std::to_string(b.size()) + " != " + std::to_string(a.rows()));
    if (a.rows() != a.cols())
        detail::fail_dims("sb_run", "the blur operator must be square (x starts at b)");
    if (truth && truth->size() != a.cols())
        detail::fail_dims("sb_run", "truth length mismatch");

    const AugmentedOp<Op> ahat(a, cfg.lambda_x, cfg.lambda_y);
    const std::size_t n = ahat.side(), p = diff_rows(n);

    SbResult res;
    SbState& st = res.state;
    st.x.assign(b.begin(), b.end());
    st.dx.assign(p, 0.0);
    st.dy.assign(p, 0.0);
    st.gx.assign(p, 0.0);
    st.gy.assign(p, 0.0);

    while (st.ell < cfg.l_max) {
        const VectorD bhat = aug_rhs(b, st.dx, st.dy, st.gx, st.gy, cfg.lambda_x, cfg.lambda_y);
        CglsResult inner = cgls_solve(ahat, bhat, cfg.cgls, &res.flops,
                                      cfg.warm_start ? std::span<const double>(st.x) : std::span<const double>());
        ++st.ell;
        if (!all_finite<double>(inner.x))
            throw NumericalError("Split Bregman iterate became non-finite at iteration " + std::to_string(st.ell));
        res.cgls_iters.push_back(inner.iters);
        res.cgls_status.push_back(inner.status);
        res.iota_total += inner.iters;

        VectorD cx = diff_x(inner.x, n);
        VectorD cy = diff_y(inner.x, n);
        for (std::size_t i = 0; i < p; ++i) {
            cx[i] += st.gx[i];
            cy[i] += st.gy[i];
        }
        DPair d = cfg.variant == TvVariant::Aniso ? update_d_aniso(cx, cy, cfg.gamma_x(), cfg.gamma_y())
                                                  : update_d_iso(cx, cy, cfg.gamma_x(), cfg.gamma_y());
        st.dx = std::move(d.dx);
        st.dy = std::move(d.dy);
        update_g(st.gx, st.gy, inner.x, st.dx, st.dy, n);

        const double rc = relative_change(inner.x, st.x);
        st.x = std::move(inner.x);
        res.rc_sb.push_back(rc);
        if (truth) {
            res.re.push_back(relative_error(st.x, *truth));
            res.isnr_db.push_back(isnr_db(st.x, b, *truth));
        }
        if (rc < cfg.tau_sb) {
            res.converged = true;
            break;
        }
    }
    return res;
}

} // namespace kpsb
