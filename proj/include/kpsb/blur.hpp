#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "kpsb/matrix.hpp"

namespace kpsb {

enum class Boundary { Zero, Reflexive };

const char* to_string(Boundary bc);
Boundary parse_boundary(const std::string& s);

// Point spread function with an odd support and its arithmetic center.
struct Psf {
    MatrixD kernel;
    std::size_t center_row = 0;
    std::size_t center_col = 0;

    // Requires odd dimensions and non-negative entries with positive sum;
    // the kernel is scaled to sum to 1.
    static Psf centered(MatrixD kernel);

    // 1 at the center of a size x size support.
    static Psf delta(std::size_t size = 1);
};

// Largest image side accepted by build_blur_matrix (N = n^2 <= 40000).
inline constexpr std::size_t dense_side_cap = 200;

//
// Spatially invariant blur of an n x n image, pixels ordered column-major
// (x = vec(X)):
//
//   B(r, c) = sum_{r', c'} P(r - r' + cr, c - c' + cc) X(r', c')
//
// Zero boundaries drop out-of-image pixels; reflexive boundaries mirror them
// about the image edge (index -1 -> 0, n -> n-1).
//
MatrixD build_blur_matrix(const Psf& psf, std::size_t n, Boundary bc, std::size_t max_side = dense_side_cap);

// The same operator applied to one image without forming the matrix.
VectorD blur_image(const Psf& psf, std::span<const double> x, std::size_t n, Boundary bc);

// Random non-separable kernel: a Gaussian envelope modulated by the
// intensity of a smoothed complex Gaussian field. `roughness` in (0, 1]
// weighs the speckle part. Retries with derived seeds until
// sigma_2 / sigma_1 of the kernel exceeds 0.1.
Psf synth_speckle_psf(std::size_t size, double roughness, std::uint64_t seed);

struct NoiseSpec {
    double level = 0.0;
    std::uint64_t seed = 0;
};

struct NoisyData {
    VectorD b;
    VectorD eta;
};

// eta = level * (||b_true|| / ||zeta||) * zeta with zeta ~ N(0, 1), b = b_true + eta.
NoisyData add_noise(std::span<const double> b_true, const NoiseSpec& spec);

// Piecewise-constant test image in [0, 1] (rectangles and disks on a dim
// background), n x n.
MatrixD phantom(std::size_t n);

} // namespace kpsb
