#include "kpsb/lowrank.hpp"

#include <algorithm>
#include <cmath>

namespace kpsb {

const char* to_string(Reorthogonalization r)
{
    switch (r) {
    case Reorthogonalization::Auto:
        return "auto";
    case Reorthogonalization::OneSided:
        return "one-sided";
    case Reorthogonalization::Full:
        return "full";
    }
    return "?";
}

const char* to_string(StopReason r)
{
    switch (r) {
    case StopReason::NuRose:
        return "nu_rose";
    case StopReason::NuBelowTol:
        return "nu_below_tol";
    case StopReason::HitKmax:
        return "hit_kmax";
    case StopReason::Breakdown:
        return "breakdown";
    }
    return "?";
}

RankChoice auto_rank(std::span<const double> nus, const RankRule& rule)
{
    if (nus.size() < 2)
        throw ValidationError("auto_rank: need at least two nu values");
    const std::size_t lo = std::max<std::size_t>(rule.k_min, first_nu_index);
    for (std::size_t j = lo; j <= rule.k_max && j <= nus.size(); ++j) {
        const double nu = nus[j - 1];
        if (j < nus.size() && nus[j] > nu)
            return {j, StopReason::NuRose};
        if (nu < rule.tau)
            return {j, StopReason::NuBelowTol};
    }
    return {rule.k_max, StopReason::HitKmax};
}

void EgkbConfig::validate() const
{
    if (k_min > k_max)
        throw ValidationError("egkb: k_min > k_max");
    if (k_max < 1)
        throw ValidationError("egkb: k_max must be >= 1");
    if (!(tau > 0))
        throw ValidationError("egkb: tau_egkb must be > 0");
}

void RsvdConfig::validate() const
{
    if (k < 1)
        throw ValidationError("rsvd: k must be >= 1");
}

template <Real T>
Matrix<T> Bidiagonalization<T>::bidiagonal() const
{
    const std::size_t nq = alphas.size();
    const std::size_t ns = s.cols();
    Matrix<T> c(ns, nq);
    for (std::size_t i = 0; i < nq; ++i) {
        c(i, i) = alphas[i];
        if (i + 1 < ns)
            c(i + 1, i) = ts[i + 1];
    }
    return c;
}

namespace {

Reorthogonalization resolve(Reorthogonalization r, Precision p)
{
    if (r != Reorthogonalization::Auto)
        return r;
    return p == Precision::Single ? Reorthogonalization::Full : Reorthogonalization::OneSided;
}

template <Real T>
void mgs_against(std::span<T> v, const std::vector<Vector<T>>& basis)
{
    for (const auto& b : basis) {
        const std::span<const T> bs = b;
        axpy(-dot(bs, std::span<const T>(v)), bs, v);
    }
}

//
// Golub-Kahan lower bidiagonalization, one half-step at a time.
//
template <Real T>
class GkbProcess {
public:
    GkbProcess(const Matrix<T>& b, Reorthogonalization reorth)
        : b_(b)
        , reorth_(reorth)
    {
        const T scale = std::sqrt(static_cast<T>(std::max(b.rows(), b.cols())));
        tol_ = std::numeric_limits<T>::epsilon() * scale * frobenius_norm(b);
    }

    // t_1, s_1, alpha_1, q_1.
    void start(std::span<const T> y0)
    {
        if (y0.size() != b_.rows())
            detail::fail_dims("egkb", "starting vector length != rows(B)");
        const T t1 = norm2(y0);
        if (!(t1 > T(0)))
            throw ValidationError("egkb: starting vector is zero");
        Vector<T> s(y0.begin(), y0.end());
        scale(T(1) / t1, std::span<T>(s));
        Vector<T> q = matvec_t(b_, std::span<const T>(s));
        const T a1 = norm2(std::span<const T>(q));
        if (!(a1 > tol_))
            throw NumericalError("egkb: B^T y0 vanishes (zero operator?)");
        scale(T(1) / a1, std::span<T>(q));
        ts_.push_back(t1);
        s_.push_back(std::move(s));
        alphas_.push_back(a1);
        q_.push_back(std::move(q));
    }

    // s_{j} = B q_{j-1} - alpha_{j-1} s_{j-1}; false on breakdown (t_j ~ 0).
    bool next_s()
    {
        if (s_.size() >= b_.rows())
            return false;
        Vector<T> s = matvec(b_, std::span<const T>(q_.back()));
        axpy(-alphas_.back(), std::span<const T>(s_.back()), std::span<T>(s));
        if (reorth_ == Reorthogonalization::Full)
            mgs_against(std::span<T>(s), s_);
        const T t = norm2(std::span<const T>(s));
        if (!std::isfinite(t))
            throw NumericalError("egkb: non-finite value in bidiagonalization");
        if (!(t > tol_))
            return false;
        scale(T(1) / t, std::span<T>(s));
        ts_.push_back(t);
        s_.push_back(std::move(s));
        return true;
    }

    // q_j = B^T s_j - t_j q_{j-1}, reorthogonalized; false on breakdown.
    bool next_q()
    {
        if (q_.size() >= b_.cols())
            return false;
        Vector<T> q = matvec_t(b_, std::span<const T>(s_.back()));
        axpy(-ts_.back(), std::span<const T>(q_.back()), std::span<T>(q));
        mgs_against(std::span<T>(q), q_);
        const T a = norm2(std::span<const T>(q));
        if (!std::isfinite(a))
            throw NumericalError("egkb: non-finite value in bidiagonalization");
        if (!(a > tol_))
            return false;
        scale(T(1) / a, std::span<T>(q));
        alphas_.push_back(a);
        q_.push_back(std::move(q));
        return true;
    }

    std::size_t num_q() const { return q_.size(); }
    T alpha(std::size_t j) const { return alphas_[j - 1]; }
    T t(std::size_t j) const { return ts_[j - 1]; }

    // Factors with `nq` columns of Q and min(nq + 1, available) columns of S.
    Bidiagonalization<T> take(std::size_t nq) const
    {
        nq = std::min(nq, q_.size());
        const std::size_t ns = std::min(nq + 1, s_.size());
        Bidiagonalization<T> f;
        f.s = Matrix<T>(b_.rows(), ns);
        for (std::size_t j = 0; j < ns; ++j)
            f.s.set_col(j, s_[j]);
        f.q = Matrix<T>(b_.cols(), nq);
        for (std::size_t j = 0; j < nq; ++j)
            f.q.set_col(j, q_[j]);
        f.alphas.assign(alphas_.begin(), alphas_.begin() + static_cast<std::ptrdiff_t>(nq));
        f.ts.assign(ts_.begin(), ts_.begin() + static_cast<std::ptrdiff_t>(ns));
        return f;
    }

private:
    const Matrix<T>& b_;
    Reorthogonalization reorth_;
    T tol_ = 0;
    std::vector<Vector<T>> s_, q_;
    Vector<T> alphas_, ts_;
};

} // namespace

template <Real T>
Bidiagonalization<T> bidiagonalize(const Matrix<T>& b, std::span<const T> y0, std::size_t steps,
                                   Reorthogonalization reorth)
{
    GkbProcess<T> gkb(b, resolve(reorth, precision_of<T>));
    gkb.start(y0);
    while (gkb.num_q() < steps) {
        if (!gkb.next_s() || !gkb.next_q())
            return gkb.take(gkb.num_q());
    }
    gkb.next_s();
    return gkb.take(steps);
}

template <Real T>
EgkbResult<T> egkb(const Matrix<T>& b, const EgkbConfig& cfg, std::span<const T> y0)
{
    cfg.validate();
    EgkbResult<T> out;
    EgkbTrace& tr = out.trace;
    tr.rule = cfg.rule();
    tr.reorth = resolve(cfg.reorth, precision_of<T>);

    GkbProcess<T> gkb(b, tr.reorth);
    gkb.start(y0);
    tr.alphas.push_back(gkb.alpha(1));
    tr.ts.push_back(gkb.t(1));
    tr.zetas.push_back(tr.alphas[0] * tr.ts[0]);
    tr.nus.push_back(nu_sentinel);

    std::optional<std::size_t> k;
    const std::size_t lo = std::max<std::size_t>(cfg.k_min, first_nu_index);

    for (;;) {
        const std::size_t j = gkb.num_q(); // completed q_j
        if (k && j >= *k + cfg.p) {
            // Need s_{k_p + 1} to close the (k_p + 1) x k_p bidiagonal.
            if (gkb.next_s())
                tr.ts.push_back(gkb.t(j + 1));
            else
                tr.breakdown = true;
            break;
        }
        if (!gkb.next_s()) {
            tr.breakdown = true;
            break;
        }
        tr.ts.push_back(gkb.t(j + 1));
        if (!gkb.next_q()) {
            tr.breakdown = true;
            break;
        }
        const std::size_t jn = j + 1;
        tr.alphas.push_back(gkb.alpha(jn));
        tr.zetas.push_back(tr.alphas.back() * tr.ts.back());
        // zeta_1 carries the arbitrary scale of y0, so nu starts at j = 3.
        tr.nus.push_back(jn < first_nu_index ? nu_sentinel : std::sqrt(tr.zetas[jn - 1] * tr.zetas[jn - 2]));

        // Candidate i = jn - 1 is decidable now that nu_{i+1} is known.
        if (!k) {
            const std::size_t i = jn - 1;
            if (i >= lo && i <= cfg.k_max) {
                if (tr.nus[i] > tr.nus[i - 1]) {
                    k = i;
                    tr.stop_reason = StopReason::NuRose;
                } else if (tr.nus[i - 1] < cfg.tau) {
                    k = i;
                    tr.stop_reason = StopReason::NuBelowTol;
                }
            }
            if (!k && i >= cfg.k_max) {
                k = cfg.k_max;
                tr.stop_reason = StopReason::HitKmax;
            }
        }
    }

    const std::size_t nq = gkb.num_q();
    if (!k) {
        // Invariant subspace reached before the rule could fire: B has
        // (numerical) rank nq and the factorization is exact.
        k = nq;
        tr.stop_reason = StopReason::Breakdown;
    }
    const std::size_t kp = std::min(*k + cfg.p, nq);
    tr.chosen_k = std::min(*k, kp);
    tr.steps = kp;

    out.basis = gkb.take(kp);
    const auto small = svd_small(out.basis.bidiagonal());
    const std::size_t kk = tr.chosen_k;
    const auto ut = small.truncated(kk);
    out.svd.u = matmul(out.basis.s, ut.u);
    out.svd.v = matmul(out.basis.q, ut.v);
    out.svd.sigma = ut.sigma;
    return out;
}

template <Real T>
EgkbResult<T> egkb(const Matrix<T>& b, const EgkbConfig& cfg)
{
    const auto y0 = gaussian_vector<T>(b.rows(), cfg.seed);
    return egkb(b, cfg, std::span<const T>(y0));
}

template <Real T>
Matrix<T> RsvdResult<T>::left_vectors() const
{
    return transposed ? v : matmul(basis, u_small);
}

template <Real T>
Matrix<T> RsvdResult<T>::right_vectors() const
{
    return transposed ? matmul(basis, u_small) : v;
}

template <Real T>
TruncatedSvd<T> RsvdResult<T>::to_svd() const
{
    return {left_vectors(), sigma, right_vectors()};
}

template <Real T>
RsvdResult<T> rsvd(const Matrix<T>& b_in, const RsvdConfig& cfg)
{
    cfg.validate();
    const bool transposed = b_in.rows() < b_in.cols();
    const Matrix<T> bt = transposed ? b_in.transposed() : Matrix<T>();
    const Matrix<T>& b = transposed ? bt : b_in;

    const std::size_t kp = cfg.k + cfg.p;
    if (kp > b.cols())
        throw ValidationError("rsvd: k + p = " + std::to_string(kp) + " exceeds min(rows, cols) = "
                              + std::to_string(b.cols()));

    const Matrix<T> f = gaussian_matrix<T>(b.cols(), kp, cfg.seed);
    Matrix<T> y = orthonormalize(matmul(b, f));
    for (std::size_t it = 0; it < cfg.q; ++it) {
        const Matrix<T> z = orthonormalize(matmul_tn(b, y));
        y = orthonormalize(matmul(b, z));
    }
    const Matrix<T> h = matmul_tn(y, b); // k_p x N
    const auto small = svd_small(h).truncated(cfg.k);

    RsvdResult<T> out;
    out.basis = std::move(y);
    out.u_small = small.u;
    out.sigma = small.sigma;
    out.v = small.v;
    out.transposed = transposed;
    return out;
}

#define KPSB_INSTANTIATE(T)                                                                                           \
    template struct Bidiagonalization<T>;                                                                             \
    template struct RsvdResult<T>;                                                                                    \
    template EgkbResult<T> egkb(const Matrix<T>&, const EgkbConfig&, std::span<const T>);                             \
    template EgkbResult<T> egkb(const Matrix<T>&, const EgkbConfig&);                                                 \
    template Bidiagonalization<T> bidiagonalize(const Matrix<T>&, std::span<const T>, std::size_t,                    \
                                                Reorthogonalization);                                                 \
    template RsvdResult<T> rsvd(const Matrix<T>&, const RsvdConfig&);

KPSB_INSTANTIATE(float)
KPSB_INSTANTIATE(double)

#undef KPSB_INSTANTIATE

} // namespace kpsb
