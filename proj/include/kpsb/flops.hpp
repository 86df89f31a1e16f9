#pragma once

#include <cstdint>

namespace kpsb {

// Floating-point operation counts (2 per multiply-add) accumulated by
// operator applications. One counter per solver run; merge explicitly.
struct FlopCounter {
    std::uint64_t kp_apply = 0;    // Kronecker-sum products (forward and transpose)
    std::uint64_t dense_apply = 0; // dense matrix-vector products

    FlopCounter& operator+=(const FlopCounter& o) noexcept
    {
        kp_apply += o.kp_apply;
        dense_apply += o.dense_apply;
        return *this;
    }
};

} // namespace kpsb
