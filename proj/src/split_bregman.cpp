#include "kpsb/split_bregman.hpp"

#include <cmath>

namespace kpsb {

const char* to_string(TvVariant v)
{
    return v == TvVariant::Aniso ? "aniso" : "iso";
}

TvVariant parse_variant(const std::string& s)
{
    if (s == "aniso")
        return TvVariant::Aniso;
    if (s == "iso")
        return TvVariant::Iso;
    throw ValidationError("unknown TV variant '" + s + "' (expected aniso or iso)");
}

SbConfig SbConfig::uniform(TvVariant variant, double lambda, double beta)
{
    SbConfig c;
    c.variant = variant;
    c.lambda_x = c.lambda_y = lambda;
    c.beta_x = c.beta_y = beta;
    return c;
}

SbConfig SbConfig::from_gamma(TvVariant variant, double lambda, double gamma)
{
    if (!(gamma > 0))
        throw ValidationError("gamma must be positive");
    return uniform(variant, lambda, lambda * lambda / gamma);
}

void SbConfig::validate() const
{
    for (double v : {lambda_x, lambda_y, beta_x, beta_y})
        if (!(v > 0) || !std::isfinite(v))
            throw ValidationError("lambda and beta must be positive and finite");
    if (!(tau_sb >= 0) || !std::isfinite(tau_sb))
        throw ValidationError("tau_sb must be finite and non-negative");
    if (l_max == 0)
        throw ValidationError("l_max must be positive");
    cgls.validate();
}

double shrink(double w, double v)
{
    const double m = std::abs(w) - v;
    return m > 0 ? std::copysign(m, w) : 0.0;
}

DPair update_d_aniso(std::span<const double> cx, std::span<const double> cy, double gamma_x, double gamma_y)
{
    if (!(gamma_x > 0) || !(gamma_y > 0))
        throw ValidationError("shrinkage gamma must be positive");
    DPair d{VectorD(cx.size()), VectorD(cy.size())};
    const double vx = 1.0 / gamma_x, vy = 1.0 / gamma_y;
    for (std::size_t i = 0; i < cx.size(); ++i)
        d.dx[i] = shrink(cx[i], vx);
    for (std::size_t i = 0; i < cy.size(); ++i)
        d.dy[i] = shrink(cy[i], vy);
    return d;
}

DPair update_d_iso(std::span<const double> cx, std::span<const double> cy, double gamma_x, double gamma_y)
{
    if (!(gamma_x > 0) || !(gamma_y > 0))
        throw ValidationError("shrinkage gamma must be positive");
    if (cx.size() != cy.size())
        detail::fail_dims("update_d_iso", "cx and cy lengths differ");
    DPair d{VectorD(cx.size(), 0.0), VectorD(cy.size(), 0.0)};
    const double vx = 1.0 / gamma_x, vy = 1.0 / gamma_y;
    for (std::size_t i = 0; i < cx.size(); ++i) {
        const double s = std::hypot(cx[i], cy[i]);
        if (s == 0)
            continue;
        d.dx[i] = cx[i] / s * std::max(s - vx, 0.0);
        d.dy[i] = cy[i] / s * std::max(s - vy, 0.0);
    }
    return d;
}

void update_g(std::span<double> gx, std::span<double> gy, std::span<const double> x, std::span<const double> dx,
              std::span<const double> dy, std::size_t n)
{
    const VectorD lx = diff_x(x, n);
    const VectorD ly = diff_y(x, n);
    if (gx.size() != lx.size() || gy.size() != ly.size() || dx.size() != lx.size() || dy.size() != ly.size())
        detail::fail_dims("update_g", "d/g lengths must equal n(n-1)");
    for (std::size_t i = 0; i < lx.size(); ++i) {
        gx[i] += lx[i] - dx[i];
        gy[i] += ly[i] - dy[i];
    }
}

} // namespace kpsb
