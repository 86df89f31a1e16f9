#pragma once

#include <filesystem>
#include <variant>

#include "kpsb/matrix.hpp"

namespace kpsb {

//
// Binary matrix files ("mtx32"/"mtx64").
//
//   offset  size  field
//   0       4     magic "KBMT"
//   4       1     precision code: 32 (float) or 64 (double)
//   5       3     reserved, zero
//   8       4     rows, u32 little-endian
//   12      4     cols, u32 little-endian
//   16      ...   rows*cols little-endian IEEE-754 scalars, row-major
//

using AnyMatrix = std::variant<MatrixF, MatrixD>;

template <Real T>
void write_mtx(const std::filesystem::path& path, const Matrix<T>& m);

AnyMatrix read_mtx_any(const std::filesystem::path& path);

// Reads either precision and converts to T.
template <Real T>
Matrix<T> read_mtx(const std::filesystem::path& path);

// True when the file starts with the mtx magic.
bool is_mtx_file(const std::filesystem::path& path);

} // namespace kpsb
