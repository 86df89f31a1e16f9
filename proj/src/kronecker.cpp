#include "kpsb/kronecker.hpp"

#include <fstream>

#include <json.hpp>

#include "kpsb/mtx_io.hpp"

namespace kpsb {

KroneckerSum::KroneckerSum(BlockScheme scheme, std::vector<KroneckerTerm> terms)
    : scheme_(scheme)
    , terms_(std::move(terms))
{
    for (const auto& t : terms_) {
        if (t.ax.rows() != scheme_.m1 || t.ax.cols() != scheme_.n1)
            detail::fail_dims("KroneckerSum", "A_x shape does not match scheme " + scheme_.describe());
        if (t.ay.rows() != scheme_.m2 || t.ay.cols() != scheme_.n2)
            detail::fail_dims("KroneckerSum", "A_y shape does not match scheme " + scheme_.describe());
    }
}

std::uint64_t KroneckerSum::flops_per_apply() const noexcept
{
    const std::uint64_t m2 = scheme_.m2, n1 = scheme_.n1;
    return 2 * (m2 * cols() + rows() * n1) * terms_.size();
}

VectorD KroneckerSum::apply(std::span<const double> x, FlopCounter* flops) const
{
    if (x.size() != cols())
        detail::fail_dims("KroneckerSum::apply", "length " + std::to_string(x.size()) + " != " + std::to_string(cols()));
    const auto [m1, m2, n1, n2] = scheme_;
    // Row-major views: Xt = array(x, n2, n1)^T is n1 x n2, the result is
    // Yt = (sum_i A_y X A_x^T)^T = sum_i A_x Xt A_y^T, m1 x m2.
    VectorD yt(m1 * m2, 0.0);
    VectorD w(n1 * m2);
    std::uint64_t madds = 0;
    for (const auto& [ax, ay] : terms_) {
        for (std::size_t c = 0; c < n1; ++c) {
            const std::span<const double> xc = x.subspan(c * n2, n2);
            for (std::size_t r = 0; r < m2; ++r) {
                w[c * m2 + r] = dot(xc, ay.row(r));
                madds += n2;
            }
        }
        for (std::size_t a = 0; a < m1; ++a) {
            const std::span<double> ya(yt.data() + a * m2, m2);
            for (std::size_t c = 0; c < n1; ++c) {
                axpy(ax(a, c), std::span<const double>(w.data() + c * m2, m2), ya);
                madds += m2;
            }
        }
    }
    if (flops)
        flops->kp_apply += 2 * madds;
    return yt;
}

VectorD KroneckerSum::apply_t(std::span<const double> y, FlopCounter* flops) const
{
    if (y.size() != rows())
        detail::fail_dims("KroneckerSum::apply_t",
                          "length " + std::to_string(y.size()) + " != " + std::to_string(rows()));
    const auto [m1, m2, n1, n2] = scheme_;
    // Xt = sum_i A_x^T Yt A_y with Yt = array(y, m2, m1)^T.
    VectorD xt(n1 * n2, 0.0);
    VectorD w(n1 * m2);
    std::uint64_t madds = 0;
    for (const auto& [ax, ay] : terms_) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t a = 0; a < m1; ++a) {
            const std::span<const double> ya = y.subspan(a * m2, m2);
            for (std::size_t c = 0; c < n1; ++c) {
                axpy(ax(a, c), ya, std::span<double>(w.data() + c * m2, m2));
                madds += m2;
            }
        }
        for (std::size_t c = 0; c < n1; ++c) {
            const std::span<double> xc(xt.data() + c * n2, n2);
            for (std::size_t r = 0; r < m2; ++r) {
                axpy(w[c * m2 + r], ay.row(r), xc);
                madds += n2;
            }
        }
    }
    if (flops)
        flops->kp_apply += 2 * madds;
    return xt;
}

MatrixD KroneckerSum::materialize(std::size_t max_entries) const
{
    if (rows() * cols() > max_entries)
        throw ValidationError("KroneckerSum::materialize: " + std::to_string(rows()) + "x" + std::to_string(cols())
                              + " exceeds the cap of " + std::to_string(max_entries) + " entries");
    MatrixD a(rows(), cols());
    for (const auto& t : terms_)
        a = a + kron(t.ax, t.ay);
    return a;
}

void KroneckerSum::save(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    nlohmann::json meta;
    meta["k"] = terms_.size();
    meta["scheme"] = {{"m1", scheme_.m1}, {"m2", scheme_.m2}, {"n1", scheme_.n1}, {"n2", scheme_.n2}};
    std::ofstream out(dir / "meta.json");
    if (!out)
        throw IoError("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << '\n';
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        write_mtx(dir / ("ax_" + std::to_string(i) + ".mtx"), terms_[i].ax);
        write_mtx(dir / ("ay_" + std::to_string(i) + ".mtx"), terms_[i].ay);
    }
}

KroneckerSum KroneckerSum::load(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "meta.json");
    if (!in)
        throw IoError("cannot read " + (dir / "meta.json").string());
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed meta.json: " + std::string(e.what()));
    }
    const auto& s = meta.at("scheme");
    BlockScheme scheme{s.at("m1").get<std::size_t>(), s.at("m2").get<std::size_t>(), s.at("n1").get<std::size_t>(),
                       s.at("n2").get<std::size_t>()};
    const auto k = meta.at("k").get<std::size_t>();
    std::vector<KroneckerTerm> terms;
    terms.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        terms.push_back({read_mtx<double>(dir / ("ax_" + std::to_string(i) + ".mtx")),
                         read_mtx<double>(dir / ("ay_" + std::to_string(i) + ".mtx"))});
    return KroneckerSum(scheme, std::move(terms));
}

template <Real T>
KroneckerSum assemble(const TruncatedSvd<T>& svd, const BlockScheme& s)
{
    if (svd.u.rows() != s.rearranged_rows() || svd.v.rows() != s.rearranged_cols())
        detail::fail_dims("assemble", "SVD factors do not match the rearranged shape of " + s.describe());
    std::vector<KroneckerTerm> terms;
    terms.reserve(svd.rank());
    for (std::size_t i = 0; i < svd.rank(); ++i) {
        const VectorD u = cast<double>(std::span<const T>(svd.u.col(i)));
        const VectorD v = cast<double>(std::span<const T>(svd.v.col(i)));
        MatrixD ax = array(std::span<const double>(u), s.m1, s.n1);
        scale(static_cast<double>(svd.sigma[i]), ax.values());
        terms.push_back({std::move(ax), array(std::span<const double>(v), s.m2, s.n2)});
    }
    return KroneckerSum(s, std::move(terms));
}

template KroneckerSum assemble(const TruncatedSvd<float>&, const BlockScheme&);
template KroneckerSum assemble(const TruncatedSvd<double>&, const BlockScheme&);

} // namespace kpsb
