#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpsb/linalg.hpp"

namespace kpsb {

enum class Reorthogonalization {
    Auto,     // Full in single precision, OneSided in double
    OneSided, // right Lanczos vectors q_j only
    Full,     // both s_j and q_j
};

enum class StopReason { NuRose, NuBelowTol, HitKmax, Breakdown };

const char* to_string(Reorthogonalization r);
const char* to_string(StopReason r);

// Parameters of the nu_j rank rule.
struct RankRule {
    double tau = 1e-6;
    std::size_t k_min = 2;
    std::size_t k_max = 20;
};

struct RankChoice {
    std::size_t k = 0;
    StopReason reason = StopReason::HitKmax;
};

// nu_j = sqrt(zeta_j zeta_{j-1}) is meaningful from j = 3 on; nu_1 and nu_2
// hold nu_sentinel and never enter the rule.
inline constexpr std::size_t first_nu_index = 3;

// nus[0] is nu_1. Returns the smallest j >= max(k_min, 3) with
// nu_{j+1} > nu_j or nu_j < tau; k_max (HitKmax) if no such j <= k_max exists.
// A tie nu_{j+1} == nu_j does not count as a rise.
RankChoice auto_rank(std::span<const double> nus, const RankRule& rule);

struct EgkbConfig {
    std::size_t k_max = 20;
    std::size_t p = 2;
    double tau = 1e-6;
    std::size_t k_min = 2;
    Reorthogonalization reorth = Reorthogonalization::Auto;
    std::uint64_t seed = 0;

    RankRule rule() const { return {tau, k_min, k_max}; }
    void validate() const;
};

inline constexpr double nu_sentinel = 100.0;

struct EgkbTrace {
    // Index 0 corresponds to j = 1.
    std::vector<double> alphas;
    std::vector<double> ts;
    std::vector<double> zetas; // alpha_j * t_j
    std::vector<double> nus;   // sqrt(zeta_j * zeta_{j-1}); nu_1 = nu_2 = nu_sentinel
    std::size_t chosen_k = 0;
    StopReason stop_reason = StopReason::HitKmax;
    // The Krylov space became invariant (t_j or alpha_j numerically zero);
    // the factorization is exact and chosen_k may be below k_min.
    bool breakdown = false;
    std::size_t steps = 0; // k_p actually reached (columns of Q)
    RankRule rule;
    Reorthogonalization reorth = Reorthogonalization::OneSided;
};

// B Q = S C with C lower bidiagonal: C(i,i) = alpha_{i+1}, C(i+1,i) = t_{i+2}.
template <Real T>
struct Bidiagonalization {
    Matrix<T> s; // M x (steps + 1), or M x steps after a t-breakdown
    Matrix<T> q; // N x steps
    Vector<T> alphas;
    Vector<T> ts; // t_1 = ||y0|| first

    Matrix<T> bidiagonal() const;
};

template <Real T>
struct EgkbResult {
    TruncatedSvd<T> svd;
    EgkbTrace trace;
    Bidiagonalization<T> basis;
};

// Enlarged Golub-Kahan bidiagonalization with the nu_j rank rule. After the
// rule fixes k the iteration continues to k_p = k + p before the projected
// bidiagonal SVD is truncated back to k terms.
template <Real T>
EgkbResult<T> egkb(const Matrix<T>& b, const EgkbConfig& cfg, std::span<const T> y0);

// Same, with a seeded standard-normal starting vector.
template <Real T>
EgkbResult<T> egkb(const Matrix<T>& b, const EgkbConfig& cfg);

// `steps` plain GKB steps (no rank rule), mostly for checking the
// factorization and orthogonality properties.
template <Real T>
Bidiagonalization<T> bidiagonalize(const Matrix<T>& b, std::span<const T> y0, std::size_t steps,
                                   Reorthogonalization reorth);

struct RsvdConfig {
    std::size_t k = 5;
    std::size_t p = 2;
    std::size_t q = 1; // power iterations
    std::uint64_t seed = 0;

    void validate() const;
};

// RSVD output in factored form: left vectors are kept as basis * u_small so
// products with them need not materialize the M x k matrix.
template <Real T>
struct RsvdResult {
    Matrix<T> basis;   // orthonormal range basis, M x k_p (N x k_p if transposed)
    Matrix<T> u_small; // k_p x k
    Vector<T> sigma;   // k
    Matrix<T> v;       // N x k (M x k if transposed)
    bool transposed = false;

    // Materialized left singular vectors of B (M x k).
    Matrix<T> left_vectors() const;
    // Right singular vectors of B (N x k).
    Matrix<T> right_vectors() const;
    TruncatedSvd<T> to_svd() const;
};

// Randomized SVD with q power iterations, orthonormalizing after every
// product with B or B^T. Matrices with more columns than rows are handled
// through B^T.
template <Real T>
RsvdResult<T> rsvd(const Matrix<T>& b, const RsvdConfig& cfg);

} // namespace kpsb
