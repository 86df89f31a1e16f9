#include "kpsb/mtx_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "kpsb/error.hpp"
#include "kpsb/linalg.hpp"

namespace kpsb {

namespace {

constexpr std::array<char, 4> magic = {'K', 'B', 'M', 'T'};

static_assert(std::endian::native == std::endian::little, "mtx I/O assumes a little-endian host");

void put_u32(std::array<unsigned char, 16>& h, std::size_t off, std::uint32_t v)
{
    for (int b = 0; b < 4; ++b)
        h[off + b] = static_cast<unsigned char>((v >> (8 * b)) & 0xffu);
}

std::uint32_t get_u32(const std::array<unsigned char, 16>& h, std::size_t off)
{
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b)
        v |= static_cast<std::uint32_t>(h[off + b]) << (8 * b);
    return v;
}

template <Real T>
Matrix<T> read_body(std::ifstream& in, std::size_t rows, std::size_t cols, const std::filesystem::path& path)
{
    Matrix<T> m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(T)));
    if (!in)
        throw IoError("truncated mtx file: " + path.string());
    return m;
}

} // namespace

template <Real T>
void write_mtx(const std::filesystem::path& path, const Matrix<T>& m)
{
    constexpr auto limit = std::numeric_limits<std::uint32_t>::max();
    if (m.rows() > limit || m.cols() > limit)
        throw ValidationError("write_mtx: dimensions exceed u32");
    std::array<unsigned char, 16> header{};
    std::memcpy(header.data(), magic.data(), 4);
    header[4] = static_cast<unsigned char>(precision_of<T>);
    put_u32(header, 8, static_cast<std::uint32_t>(m.rows()));
    put_u32(header, 12, static_cast<std::uint32_t>(m.cols()));

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(header.data()), header.size());
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(T)));
    if (!out)
        throw IoError("write failed: " + path.string());
}

AnyMatrix read_mtx_any(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open: " + path.string());
    std::array<unsigned char, 16> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (!in || std::memcmp(header.data(), magic.data(), 4) != 0)
        throw IoError("not an mtx file: " + path.string());
    const std::size_t rows = get_u32(header, 8);
    const std::size_t cols = get_u32(header, 12);
    switch (header[4]) {
    case static_cast<unsigned char>(Precision::Single):
        return read_body<float>(in, rows, cols, path);
    case static_cast<unsigned char>(Precision::Double):
        return read_body<double>(in, rows, cols, path);
    default:
        throw IoError("unknown precision code " + std::to_string(header[4]) + " in " + path.string());
    }
}

template <Real T>
Matrix<T> read_mtx(const std::filesystem::path& path)
{
    return std::visit([](auto&& m) { return cast<T>(m); }, read_mtx_any(path));
}

bool is_mtx_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::array<char, 4> head{};
    in.read(head.data(), 4);
    return in && head == magic;
}

template void write_mtx(const std::filesystem::path&, const Matrix<float>&);
template void write_mtx(const std::filesystem::path&, const Matrix<double>&);
template Matrix<float> read_mtx<float>(const std::filesystem::path&);
template Matrix<double> read_mtx<double>(const std::filesystem::path&);

} // namespace kpsb
