#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "kpsb/flops.hpp"
#include "kpsb/linalg.hpp"
#include "kpsb/rearrange.hpp"

namespace kpsb {

struct KroneckerTerm {
    MatrixD ax; // m1 x n1
    MatrixD ay; // m2 x n2
};

//
// A ~ sum_i A_{x_i} (x) A_{y_i}, applied without forming the M x N matrix:
//
//   array(A x) = sum_i A_{y_i} X A_{x_i}^T,   X = array(x, n2, n1).
//
// Factors are always held in double precision.
//
class KroneckerSum {
public:
    KroneckerSum() = default;
    KroneckerSum(BlockScheme scheme, std::vector<KroneckerTerm> terms);

    const BlockScheme& scheme() const noexcept { return scheme_; }
    const std::vector<KroneckerTerm>& terms() const noexcept { return terms_; }
    std::size_t num_terms() const noexcept { return terms_.size(); }
    std::size_t rows() const noexcept { return scheme_.rows(); }
    std::size_t cols() const noexcept { return scheme_.cols(); }

    VectorD apply(std::span<const double> x, FlopCounter* flops = nullptr) const;
    VectorD apply_t(std::span<const double> y, FlopCounter* flops = nullptr) const;

    // 2 (m2 N + M n1) k: flops of one apply or apply_t.
    std::uint64_t flops_per_apply() const noexcept;

    // Dense sum of Kronecker products; refuses matrices above `max_entries`.
    MatrixD materialize(std::size_t max_entries = std::size_t(1) << 24) const;

    // Directory with meta.json and ax_<i>.mtx / ay_<i>.mtx (i from 0).
    void save(const std::filesystem::path& dir) const;
    static KroneckerSum load(const std::filesystem::path& dir);

private:
    BlockScheme scheme_;
    std::vector<KroneckerTerm> terms_;
};

// Term i: A_x = sigma_i * array(U_i, m1, n1), A_y = array(V_i, m2, n2), cast
// to double.
template <Real T>
KroneckerSum assemble(const TruncatedSvd<T>& svd, const BlockScheme& s);

} // namespace kpsb
