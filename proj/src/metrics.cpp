#include "kpsb/metrics.hpp"

#include <cmath>
#include <limits>

namespace kpsb {

namespace {

void same_length(const char* where, std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        detail::fail_dims(where, "length " + std::to_string(a.size()) + " != " + std::to_string(b.size()));
}

constexpr double inf = std::numeric_limits<double>::infinity();

} // namespace

double snr_db(std::span<const double> b_true, std::span<const double> b)
{
    same_length("snr_db", b_true, b);
    const double den = distance(b_true, b);
    if (den == 0)
        return inf;
    return 20.0 * std::log10(norm2(b_true) / den);
}

double relative_error(std::span<const double> x, std::span<const double> x_true)
{
    same_length("relative_error", x, x_true);
    const double nt = norm2(x_true);
    if (nt == 0)
        throw ValidationError("relative_error: reference is zero");
    return distance(x, x_true) / nt;
}

double isnr_db(std::span<const double> x, std::span<const double> b, std::span<const double> x_true)
{
    same_length("isnr_db", x, x_true);
    same_length("isnr_db", b, x_true);
    const double num = distance(b, x_true);
    const double den = distance(x, x_true);
    if (den == 0) {
        if (num == 0)
            throw ValidationError("isnr_db: undefined when x, b and x_true coincide");
        return inf;
    }
    return 20.0 * std::log10(num / den);
}

double relative_change(std::span<const double> x_new, std::span<const double> x_old)
{
    same_length("relative_change", x_new, x_old);
    const double no = norm2(x_old);
    if (no == 0)
        throw ValidationError("relative_change: previous iterate is zero");
    return distance(x_new, x_old) / no;
}

CostModel CostModel::square(std::uint64_t n, std::uint64_t k, std::uint64_t p, std::uint64_t rho,
                            std::uint64_t iota_total)
{
    CostModel cm;
    cm.M = cm.N = n * n;
    cm.P = n * (n - 1);
    cm.T = cm.M + 2 * cm.P;
    cm.m1 = cm.m2 = cm.n1 = cm.n2 = n;
    cm.k = k;
    cm.k_p = k + p;
    cm.rho = rho;
    cm.iota_total = iota_total;
    return cm;
}

void CostModel::validate() const
{
    if (M == 0 || N == 0 || n1 == 0 || k == 0 || k_p == 0)
        throw ValidationError("cost model sizes must be positive");
    if (T != M + 2 * P)
        throw ValidationError("cost model requires T = M + 2P");
    if (k_p < k)
        throw ValidationError("cost model requires k_p >= k");
    if (rho != 1 && rho != 2)
        throw ValidationError("rho must be 1 (EGKB) or 2 (RSVD)");
}

SpeedupPrediction predict_speedups(const CostModel& cm)
{
    cm.validate();
    const double n = static_cast<double>(cm.N), p = static_cast<double>(cm.P);
    const double it = static_cast<double>(cm.iota_total), kp = static_cast<double>(cm.k_p);
    SpeedupPrediction s;
    s.sb_speedup = (n + 2 * p) / (2.0 * static_cast<double>(cm.k) * static_cast<double>(cm.n1));
    s.alg_speedup = 4 * (n + 2 * p) * n * it / (4 * static_cast<double>(cm.rho) * n * n * kp);
    s.alg_speedup_note = 1.5 * it / kp;
    return s;
}

} // namespace kpsb
