#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "kpsb/operators.hpp"

namespace kpsb {

struct CglsConfig {
    std::size_t i_max = 100;
    double tau = 1e-4; // RC_CGLS tolerance; 0 runs to i_max

    void validate() const
    {
        if (i_max == 0)
            throw ValidationError("CGLS i_max must be positive");
        if (!(tau >= 0) || !std::isfinite(tau))
            throw ValidationError("CGLS tolerance must be finite and non-negative");
    }
};

enum class CglsStatus {
    Converged,     // RC_CGLS < tau
    MaxIterations, // i_max reached
    ZeroGradient,  // A^T r == 0: x solves the least-squares problem
    ZeroDirection, // A w == 0 with a nonzero search direction
};

inline const char* to_string(CglsStatus s)
{
    switch (s) {
    case CglsStatus::Converged: return "converged";
    case CglsStatus::MaxIterations: return "max-iterations";
    case CglsStatus::ZeroGradient: return "zero-gradient";
    case CglsStatus::ZeroDirection: return "zero-direction";
    }
    return "?";
}

struct CglsResult {
    VectorD x;
    std::size_t iters = 0;
    // RC_CGLS = ||mu w|| / ||x|| for iterations 1, 2, ... (x before the update;
    // iteration 0 starts from x = 0 and has no relative change).
    std::vector<double> rc_history;
    // ||r|| before the first and after every iteration.
    std::vector<double> residual_history;
    CglsStatus status = CglsStatus::MaxIterations;
};

//
// CGLS for min ||A x - b||:
//
//   r = b - A x0, w = f = A^T r, tau_0 = ||f||^2
//   repeat: z = A w, mu = tau / ||z||^2, x += mu w, r -= mu z,
//           f = A^T r, delta = tau_new / tau, w = f + delta w
//
// x0 defaults to zero.
//
template <LinearOperator Op>
CglsResult cgls_solve(const Op& a, std::span<const double> b, const CglsConfig& cfg, FlopCounter* flops = nullptr,
                      std::span<const double> x0 = {})
{
    cfg.validate();
    if (b.size() != a.rows())
        detail::fail_dims("cgls_solve", "rhs length " + std::to_string(b.size()) + " != " + std::to_string(a.rows()));
    if (!x0.empty() && x0.size() != a.cols())
        detail::fail_dims("cgls_solve", "starting vector length mismatch");

    auto check = [](double v, std::size_t iota) {
        if (!std::isfinite(v))
            throw NumericalError("CGLS produced a non-finite value at iteration " + std::to_string(iota));
    };

    CglsResult res;
    res.x = x0.empty() ? VectorD(a.cols(), 0.0) : VectorD(x0.begin(), x0.end());
    VectorD r(b.begin(), b.end());
    if (!x0.empty()) {
        const VectorD ax = a.apply(x0, flops);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] -= ax[i];
    }
    VectorD f = a.apply_t(r, flops);
    VectorD w = f;
    double tau = dot<double>(f, f);
    check(tau, 0);
    res.residual_history.push_back(norm2<double>(r));
    if (tau == 0) {
        res.status = CglsStatus::ZeroGradient;
        return res;
    }

    while (res.iters < cfg.i_max) {
        const VectorD z = a.apply(w, flops);
        const double zz = dot<double>(z, z);
        if (zz == 0) {
            res.status = CglsStatus::ZeroDirection;
            return res;
        }
        const double mu = tau / zz;
        check(mu, res.iters);

        bool converged = false;
        if (res.iters >= 1) {
            const double xn = norm2<double>(res.x);
            const double rc = std::abs(mu) * norm2<double>(w) / xn;
            res.rc_history.push_back(rc);
            converged = rc < cfg.tau;
        }

        axpy(mu, std::span<const double>(w), std::span<double>(res.x));
        axpy(-mu, std::span<const double>(z), std::span<double>(r));
        f = a.apply_t(r, flops);
        const double tau_next = dot<double>(f, f);
        check(tau_next, res.iters);
        ++res.iters;
        res.residual_history.push_back(norm2<double>(r));

        if (tau_next == 0) {
            res.status = CglsStatus::ZeroGradient;
            return res;
        }
        if (converged) {
            res.status = CglsStatus::Converged;
            return res;
        }
        const double delta = tau_next / tau;
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = f[i] + delta * w[i];
        tau = tau_next;
    }
    res.status = CglsStatus::MaxIterations;
    return res;
}

} // namespace kpsb
