#pragma once

#include <filesystem>

#include "kpsb/matrix.hpp"

namespace kpsb {

// Binary PGM (P5) images, 8- or 16-bit. Pixel values are mapped to [0, 1]
// by the file's maxval on read; on write they are clamped to [0, 1] and
// scaled to the full range of the chosen depth.
MatrixD read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const MatrixD& image, int bits = 8);

} // namespace kpsb
