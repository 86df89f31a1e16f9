#include "kpsb/blur.hpp"

#include <cmath>
#include <numeric>

#include "kpsb/linalg.hpp"

namespace kpsb {

const char* to_string(Boundary bc)
{
    return bc == Boundary::Zero ? "zero" : "reflexive";
}

Boundary parse_boundary(const std::string& s)
{
    if (s == "zero")
        return Boundary::Zero;
    if (s == "reflexive")
        return Boundary::Reflexive;
    throw ValidationError("unknown boundary condition '" + s + "' (expected zero or reflexive)");
}

Psf Psf::centered(MatrixD kernel)
{
    if (kernel.empty() || kernel.rows() % 2 == 0 || kernel.cols() % 2 == 0)
        throw ValidationError("PSF support must have odd dimensions, got " + std::to_string(kernel.rows()) + "x"
                              + std::to_string(kernel.cols()));
    double sum = 0;
    for (double v : kernel.values()) {
        if (!(v >= 0) || !std::isfinite(v))
            throw ValidationError("PSF entries must be finite and non-negative");
        sum += v;
    }
    if (sum <= 0)
        throw ValidationError("PSF sums to zero");
    scale(1.0 / sum, kernel.values());
    const std::size_t cr = kernel.rows() / 2, cc = kernel.cols() / 2;
    return {std::move(kernel), cr, cc};
}

Psf Psf::delta(std::size_t size)
{
    MatrixD k(size, size);
    k(size / 2, size / 2) = 1.0;
    return centered(std::move(k));
}

namespace {

// Source index for an out-of-image position, or -1 when it is dropped.
std::ptrdiff_t boundary_index(std::ptrdiff_t i, std::ptrdiff_t n, Boundary bc)
{
    if (i >= 0 && i < n)
        return i;
    if (bc == Boundary::Zero)
        return -1;
    return i < 0 ? -i - 1 : 2 * n - i - 1;
}

void check_fits(const Psf& psf, std::size_t n)
{
    if (n == 0)
        throw ValidationError("image side must be positive");
    if (psf.kernel.rows() > n || psf.kernel.cols() > n)
        throw ValidationError("PSF support " + std::to_string(psf.kernel.rows()) + "x"
                              + std::to_string(psf.kernel.cols()) + " is larger than the " + std::to_string(n) + "x"
                              + std::to_string(n) + " image");
}

// Calls emit(out_index, in_index, weight) for every kernel tap.
template <class Emit>
void for_each_tap(const Psf& psf, std::size_t n, Boundary bc, Emit&& emit)
{
    const auto sn = static_cast<std::ptrdiff_t>(n);
    const auto cr = static_cast<std::ptrdiff_t>(psf.center_row);
    const auto cc = static_cast<std::ptrdiff_t>(psf.center_col);
    for (std::ptrdiff_t c = 0; c < sn; ++c)
        for (std::ptrdiff_t r = 0; r < sn; ++r)
            for (std::size_t i = 0; i < psf.kernel.rows(); ++i)
                for (std::size_t j = 0; j < psf.kernel.cols(); ++j) {
                    const double w = psf.kernel(i, j);
                    if (w == 0)
                        continue;
                    const auto rs = boundary_index(r - (static_cast<std::ptrdiff_t>(i) - cr), sn, bc);
                    const auto cs = boundary_index(c - (static_cast<std::ptrdiff_t>(j) - cc), sn, bc);
                    if (rs < 0 || cs < 0)
                        continue;
                    emit(static_cast<std::size_t>(r + sn * c), static_cast<std::size_t>(rs + sn * cs), w);
                }
}

} // namespace

MatrixD build_blur_matrix(const Psf& psf, std::size_t n, Boundary bc, std::size_t max_side)
{
    if (n > max_side)
        throw ValidationError("image side " + std::to_string(n) + " exceeds the dense cap of "
                              + std::to_string(max_side));
    check_fits(psf, n);
    MatrixD a(n * n, n * n);
    for_each_tap(psf, n, bc, [&](std::size_t out, std::size_t in, double w) { a(out, in) += w; });
    return a;
}

VectorD blur_image(const Psf& psf, std::span<const double> x, std::size_t n, Boundary bc)
{
    if (x.size() != n * n)
        detail::fail_dims("blur_image", "image length " + std::to_string(x.size()) + " != " + std::to_string(n * n));
    check_fits(psf, n);
    VectorD b(n * n, 0.0);
    for_each_tap(psf, n, bc, [&](std::size_t out, std::size_t in, double w) { b[out] += w * x[in]; });
    return b;
}

namespace {

MatrixD speckle_kernel(std::size_t size, double roughness, std::uint64_t seed)
{
    const std::size_t m = size + 2;
    const VectorD g = gaussian_vector<double>(2 * m * m, seed);
    MatrixD k(size, size);
    const double c = static_cast<double>(size / 2);
    const double width = static_cast<double>(size) / 4.0;
    double mean_intensity = 0;
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) {
            double re = 0, im = 0;
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b) {
                    const std::size_t idx = (i + a) * m + (j + b);
                    re += g[idx];
                    im += g[m * m + idx];
                }
            k(i, j) = (re * re + im * im) / 18.0;
            mean_intensity += k(i, j);
        }
    mean_intensity /= static_cast<double>(size * size);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) {
            const double di = static_cast<double>(i) - c, dj = static_cast<double>(j) - c;
            const double env = std::exp(-(di * di + dj * dj) / (2 * width * width));
            k(i, j) = env * ((1 - roughness) + roughness * k(i, j) / mean_intensity);
        }
    return k;
}

} // namespace

Psf synth_speckle_psf(std::size_t size, double roughness, std::uint64_t seed)
{
    if (size < 3 || size % 2 == 0)
        throw ValidationError("speckle PSF size must be odd and at least 3, got " + std::to_string(size));
    if (!(roughness > 0 && roughness <= 1))
        throw ValidationError("speckle roughness must lie in (0, 1]");
    constexpr int max_attempts = 32;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL;
        Psf psf = Psf::centered(speckle_kernel(size, roughness, s));
        const auto svd = svd_small(psf.kernel);
        if (svd.sigma[1] > 0.1 * svd.sigma[0])
            return psf;
    }
    throw NumericalError("could not draw a non-separable speckle PSF in " + std::to_string(max_attempts)
                         + " attempts; increase roughness");
}

NoisyData add_noise(std::span<const double> b_true, const NoiseSpec& spec)
{
    if (!(spec.level >= 0) || !std::isfinite(spec.level))
        throw ValidationError("noise level must be finite and non-negative");
    NoisyData out{VectorD(b_true.begin(), b_true.end()), VectorD(b_true.size(), 0.0)};
    if (spec.level == 0)
        return out;
    const double nb = norm2(b_true);
    if (nb == 0)
        throw ValidationError("cannot scale noise relative to a zero signal");
    out.eta = gaussian_vector<double>(b_true.size(), spec.seed);
    scale(spec.level * nb / norm2(std::span<const double>(out.eta)), std::span<double>(out.eta));
    for (std::size_t i = 0; i < out.b.size(); ++i)
        out.b[i] += out.eta[i];
    return out;
}

MatrixD phantom(std::size_t n)
{
    MatrixD img(n, n, 0.1);
    const double s = static_cast<double>(n);
    auto rect = [&](double r0, double r1, double c0, double c1, double v) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double y = (static_cast<double>(i) + 0.5) / s, x = (static_cast<double>(j) + 0.5) / s;
                if (y >= r0 && y < r1 && x >= c0 && x < c1)
                    img(i, j) = v;
            }
    };
    auto disk = [&](double cy, double cx, double rad, double v) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double y = (static_cast<double>(i) + 0.5) / s - cy, x = (static_cast<double>(j) + 0.5) / s - cx;
                if (x * x + y * y < rad * rad)
                    img(i, j) = v;
            }
    };
    rect(0.15, 0.45, 0.10, 0.40, 0.9);
    rect(0.60, 0.85, 0.15, 0.70, 0.6);
    rect(0.25, 0.35, 0.55, 0.90, 0.4);
    disk(0.30, 0.72, 0.08, 1.0);
    disk(0.72, 0.80, 0.12, 0.8);
    return img;
}

} // namespace kpsb
