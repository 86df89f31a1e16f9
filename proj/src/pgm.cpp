#include "kpsb/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>

#include "kpsb/error.hpp"

namespace kpsb {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in)
{
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty())
                return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

std::size_t header_number(std::istream& in, const std::filesystem::path& path, const char* what)
{
    const std::string tok = header_token(in);
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(tok, &pos);
        if (pos == tok.size())
            return v;
    } catch (const std::exception&) {
    }
    throw IoError(path.string() + ": bad PGM " + what + " '" + tok + "'");
}

} // namespace

MatrixD read_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    if (header_token(in) != "P5")
        throw IoError(path.string() + ": not a binary PGM (P5) file");
    const std::size_t cols = header_number(in, path, "width");
    const std::size_t rows = header_number(in, path, "height");
    const std::size_t maxval = header_number(in, path, "maxval");
    if (rows == 0 || cols == 0 || maxval == 0 || maxval > 65535)
        throw IoError(path.string() + ": unsupported PGM dimensions or maxval");
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(rows * cols * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw IoError(path.string() + ": truncated pixel data");
    MatrixD img(rows, cols);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t k = 0; k < rows * cols; ++k) {
        const unsigned v = bytes == 1 ? raw[k] : (unsigned(raw[2 * k]) << 8) | raw[2 * k + 1];
        img.data()[k] = std::min(1.0, v * scale);
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const MatrixD& image, int bits)
{
    if (bits != 8 && bits != 16)
        throw ValidationError("PGM depth must be 8 or 16 bits");
    const unsigned maxval = bits == 8 ? 255 : 65535;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "P5\n" << image.cols() << ' ' << image.rows() << '\n' << maxval << '\n';
    std::vector<unsigned char> raw;
    raw.reserve(image.size() * (bits / 8));
    for (double v : image.values()) {
        const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        const auto q = static_cast<unsigned>(std::lround(c * maxval));
        if (bits == 16)
            raw.push_back(static_cast<unsigned char>(q >> 8));
        raw.push_back(static_cast<unsigned char>(q & 0xff));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw IoError("failed writing " + path.string());
}

} // namespace kpsb
