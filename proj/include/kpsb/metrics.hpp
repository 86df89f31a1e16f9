#pragma once

#include <cstdint>
#include <span>

#include "kpsb/linalg.hpp"

namespace kpsb {

// 10 log10(||b_true||^2 / ||b_true - b||^2); +inf when b == b_true.
double snr_db(std::span<const double> b_true, std::span<const double> b);

// ||x - x_true|| / ||x_true||
double relative_error(std::span<const double> x, std::span<const double> x_true);

// 20 log10(||b - x_true|| / ||x - x_true||); +inf when x == x_true.
double isnr_db(std::span<const double> x, std::span<const double> b, std::span<const double> x_true);

// ||x_new - x_old|| / ||x_old||
double relative_change(std::span<const double> x_new, std::span<const double> x_old);

// Sizes entering the reconstruction cost estimates.
struct CostModel {
    std::uint64_t M = 0, N = 0, P = 0, T = 0;
    std::uint64_t m1 = 0, m2 = 0, n1 = 0, n2 = 0;
    std::uint64_t k = 0, k_p = 0;
    std::uint64_t rho = 1; // 1 for EGKB, 2 for RSVD
    std::uint64_t iota_total = 0;

    // n x n images: M = N = n^2, P = n(n-1), m1 = m2 = n1 = n2 = n.
    static CostModel square(std::uint64_t n, std::uint64_t k, std::uint64_t p, std::uint64_t rho,
                            std::uint64_t iota_total);

    void validate() const;
};

struct SpeedupPrediction {
    double sb_speedup = 0;  // (N + 2P) / (2 k n1)
    double alg_speedup = 0; // 4 (N + 2P) N iota_total / (4 rho N^2 k_p)
    // 1.5 iota_total / k_p, the rounded lower bound quoted alongside the
    // algorithm ratio; reported for comparison only.
    double alg_speedup_note = 0;
};

SpeedupPrediction predict_speedups(const CostModel& cm);

} // namespace kpsb
