// kpsb: Kronecker-sum blur approximation and Split Bregman deblurring.
//
//   kpsb simulate  ... blurred, noisy observations from an image and a PSF
//   kpsb approx    ... k-term Kronecker approximation of a blur matrix
//   kpsb deblur    ... anisotropic / isotropic TV restoration
//   kpsb sweep     ... lambda grid at fixed gamma
//   kpsb metrics   ... SNR / RE / ISNR and predicted speedups
//
// Every subcommand accepts --config FILE with "key = value" lines; options
// on the command line take precedence.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpsb/blur.hpp"
#include "kpsb/kronecker.hpp"
#include "kpsb/lowrank.hpp"
#include "kpsb/metrics.hpp"
#include "kpsb/mtx_io.hpp"
#include "kpsb/pgm.hpp"
#include "kpsb/rearrange.hpp"
#include "kpsb/run_config.hpp"
#include "kpsb/split_bregman.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kpsb;

namespace {

json db_json(double v)
{
    if (std::isnan(v))
        return nullptr;
    if (std::isinf(v))
        return v > 0 ? "infinity" : "-infinity";
    return v;
}

json db_array(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v)
        a.push_back(db_json(x));
    return a;
}

// Effective option values of a subcommand, defaults included.
json effective_config(const CLI::App& sub)
{
    json cfg = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty())
            continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help" || name == "config")
            continue;
        if (opt->count() > 0) {
            const auto& r = opt->results();
            std::string joined;
            for (std::size_t i = 0; i < r.size(); ++i)
                joined += (i ? "," : "") + r[i];
            cfg[name] = joined;
        } else if (!opt->get_default_str().empty()) {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

void write_json(const fs::path& path, const json& j)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Square image from a PGM or an mtx file, as x = vec(X).
VectorD load_image(const fs::path& path, std::size_t& n)
{
    MatrixD img = is_mtx_file(path) ? read_mtx<double>(path) : read_pgm(path);
    if (img.rows() != img.cols())
        throw ValidationError(path.string() + ": image must be square, got " + std::to_string(img.rows()) + "x"
                              + std::to_string(img.cols()));
    n = img.rows();
    return vec(img);
}

VectorD load_image_sized(const fs::path& path, std::size_t n)
{
    std::size_t m = 0;
    VectorD x = load_image(path, m);
    if (m != n)
        throw ValidationError(path.string() + ": expected a " + std::to_string(n) + "x" + std::to_string(n) + " image");
    return x;
}

void save_image(const fs::path& stem, std::span<const double> x, std::size_t n, int bits)
{
    const MatrixD img = array(x, n, n);
    write_pgm(fs::path(stem).replace_extension(".pgm"), img, bits);
    write_mtx(fs::path(stem).replace_extension(".mtx"), img);
}

//
// simulate
//

struct SimulateArgs {
    std::string image;
    std::size_t phantom = 64;
    std::string psf;
    std::size_t psf_size = 7;
    double roughness = 0.7;
    std::uint64_t psf_seed = 1;
    std::string bc = "zero";
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool emit_matrix = false;
    int bits = 8;
};

void run_simulate(const SimulateArgs& a, const CLI::App& sub)
{
    const Boundary bc = parse_boundary(a.bc);
    std::size_t n = a.phantom;
    const VectorD truth = a.image.empty() ? vec(phantom(n)) : load_image(a.image, n);
    const Psf psf = a.psf.empty() ? synth_speckle_psf(a.psf_size, a.roughness, a.psf_seed)
                                  : Psf::centered(read_mtx<double>(a.psf));
    const VectorD b_true = blur_image(psf, truth, n, bc);
    const NoisyData noisy = add_noise(b_true, {a.noise, a.seed});

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    save_image(dir / "truth", truth, n, a.bits);
    save_image(dir / "b_true", b_true, n, a.bits);
    save_image(dir / "b", noisy.b, n, a.bits);
    write_mtx(dir / "psf.mtx", psf.kernel);
    if (a.emit_matrix)
        write_mtx(dir / "A.mtx", build_blur_matrix(psf, n, bc));

    const auto ks = svd_small(psf.kernel);
    json out;
    out["config"] = effective_config(sub);
    out["n"] = n;
    out["boundary"] = to_string(bc);
    out["noise_level"] = a.noise;
    out["snr_db"] = db_json(snr_db(b_true, noisy.b));
    out["psf"] = {{"rows", psf.kernel.rows()},
                  {"cols", psf.kernel.cols()},
                  {"sigma2_over_sigma1", ks.sigma.size() > 1 ? ks.sigma[1] / ks.sigma[0] : 0.0}};
    write_json(dir / "simulate.json", out);
    std::cout << "simulate: n=" << n << " snr_db=" << out["snr_db"].dump() << " -> " << dir.string() << '\n';
}

//
// approx
//

struct ApproxArgs {
    std::string matrix;
    std::string psf;
    std::size_t n = 0;
    std::string bc = "zero";
    std::size_t m1 = 0, m2 = 0, n1 = 0, n2 = 0;
    std::string engine = "egkb";
    std::string prec = "double";
    std::size_t kmax = 20;
    std::size_t p = 2;
    double tau_egkb = 1e-6;
    std::size_t kmin = 2;
    std::uint64_t seed = 0;
    std::string reorth = "auto";
    std::size_t k = 0;
    std::size_t q = 1;
    std::string out_dir;
};

Reorthogonalization parse_reorth(const std::string& s)
{
    if (s == "auto")
        return Reorthogonalization::Auto;
    if (s == "one-sided")
        return Reorthogonalization::OneSided;
    if (s == "full")
        return Reorthogonalization::Full;
    throw ValidationError("unknown reorthogonalization '" + s + "'");
}

BlockScheme scheme_for(const ApproxArgs& a, std::size_t rows, std::size_t cols)
{
    if (a.m1 || a.m2 || a.n1 || a.n2) {
        const BlockScheme s{a.m1, a.m2, a.n1, a.n2};
        if (s.rows() != rows || s.cols() != cols)
            throw ValidationError("block scheme " + s.describe() + " does not match a " + std::to_string(rows) + "x"
                                  + std::to_string(cols) + " matrix");
        return s;
    }
    if (rows != cols)
        throw ValidationError("non-square matrix: give --m1 --m2 --n1 --n2");
    return BlockScheme::square(image_side(cols));
}

json trace_json(const EgkbTrace& t)
{
    return {{"alphas", t.alphas},           {"ts", t.ts},
            {"zetas", t.zetas},             {"nus", t.nus},
            {"chosen_k", t.chosen_k},       {"stop_reason", to_string(t.stop_reason)},
            {"breakdown", t.breakdown},     {"steps", t.steps},
            {"reorth", to_string(t.reorth)}};
}

// Relative Frobenius error of U diag(sigma) V^T against r, in double.
template <Real T>
double svd_error(const MatrixD& r, const TruncatedSvd<T>& svd)
{
    const MatrixD approx = cast<double>(svd.reconstruct());
    return frobenius_norm(r - approx) / frobenius_norm(r);
}

template <Real T>
void run_approx_typed(MatrixD r, const BlockScheme& scheme, const ApproxArgs& a, const CLI::App& sub)
{
    EgkbConfig ecfg;
    ecfg.k_max = a.kmax;
    ecfg.p = a.p;
    ecfg.tau = a.tau_egkb;
    ecfg.k_min = a.kmin;
    ecfg.reorth = parse_reorth(a.reorth);
    ecfg.seed = a.seed;

    const Matrix<T> b = cast<T>(r);
    json out;
    out["config"] = effective_config(sub);
    out["engine"] = a.engine;
    out["precision"] = to_string(precision_of<T>);
    out["scheme"] = {{"m1", scheme.m1}, {"m2", scheme.m2}, {"n1", scheme.n1}, {"n2", scheme.n2}};

    const auto t0 = std::chrono::steady_clock::now();
    TruncatedSvd<T> svd;
    std::size_t k_p = 0;
    if (a.engine == "egkb") {
        EgkbResult<T> res = egkb(b, ecfg);
        out["trace"] = trace_json(res.trace);
        k_p = res.trace.steps;
        svd = std::move(res.svd);
    } else if (a.engine == "rsvd") {
        RsvdConfig rcfg{a.k, a.p, a.q, a.seed};
        if (rcfg.k == 0) {
            const EgkbResult<T> est = egkb(b, ecfg);
            rcfg.k = est.trace.chosen_k;
            out["k_estimate"] = {{"source", "egkb"}, {"trace", trace_json(est.trace)}};
        }
        svd = rsvd(b, rcfg).to_svd();
        k_p = rcfg.k + rcfg.p;
    } else {
        throw ValidationError("unknown engine '" + a.engine + "' (expected egkb or rsvd)");
    }
    out["svd_seconds"] = seconds_since(t0);

    out["k"] = svd.rank();
    out["k_p"] = k_p;
    out["sigma"] = cast<double>(std::span<const T>(svd.sigma));
    // ||R - R_k|| in the engine precision, and ||A - A_k|| = ||R(A) - R_k|| in double.
    out["rel_err_R"] = svd_error(cast<double>(b), svd);
    out["rel_err_A"] = svd_error(r, svd);

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    const KroneckerSum op = assemble(svd, scheme);
    op.save(dir / "kron");
    {
        std::ifstream in(dir / "kron" / "meta.json");
        json meta = json::parse(in);
        meta["k_p"] = k_p;
        meta["engine"] = a.engine;
        meta["precision"] = to_string(precision_of<T>);
        write_json(dir / "kron" / "meta.json", meta);
    }
    write_mtx(dir / "u.mtx", svd.u);
    write_mtx(dir / "sigma.mtx", Matrix<T>(svd.rank(), 1, svd.sigma));
    write_mtx(dir / "v.mtx", svd.v);
    write_json(dir / "trace.json", out);
    std::cout << "approx: engine=" << a.engine << " prec=" << a.prec << " k=" << svd.rank()
              << " rel_err_A=" << out["rel_err_A"].get<double>() << " -> " << dir.string() << '\n';
}

void run_approx(const ApproxArgs& a, const CLI::App& sub)
{
    MatrixD mat;
    if (!a.matrix.empty()) {
        mat = read_mtx<double>(a.matrix);
    } else if (!a.psf.empty()) {
        if (a.n == 0)
            throw ValidationError("--psf needs --n (image side)");
        mat = build_blur_matrix(Psf::centered(read_mtx<double>(a.psf)), a.n, parse_boundary(a.bc));
    } else {
        throw ValidationError("approx needs --matrix or --psf");
    }
    const BlockScheme scheme = scheme_for(a, mat.rows(), mat.cols());
    MatrixD r = rearrange(mat, scheme);
    mat.release();
    if (a.prec == "double")
        run_approx_typed<double>(std::move(r), scheme, a, sub);
    else if (a.prec == "single")
        run_approx_typed<float>(std::move(r), scheme, a, sub);
    else
        throw ValidationError("unknown precision '" + a.prec + "' (expected single or double)");
}

//
// deblur / sweep
//

struct OperatorArgs {
    std::string kind = "kron";
    std::string kron_dir;
    std::string matrix;
    std::string psf;
    std::string bc = "zero";
};

struct SbArgs {
    std::string variant = "aniso";
    double lambda = 0;
    double beta = 0;
    double gamma = 0;
    double tau_sb = 1e-3;
    std::size_t lmax = 50;
    double tau_cgls = 1e-4;
    std::size_t imax = 100;
    bool warm_start = false;

    SbConfig config(double lam) const
    {
        const TvVariant v = parse_variant(variant);
        if ((beta > 0) == (gamma > 0))
            throw ValidationError("give exactly one of --beta and --gamma");
        SbConfig c = beta > 0 ? SbConfig::uniform(v, lam, beta) : SbConfig::from_gamma(v, lam, gamma);
        c.tau_sb = tau_sb;
        c.l_max = lmax;
        c.cgls = {imax, tau_cgls};
        c.warm_start = warm_start;
        return c;
    }
};

void add_operator_options(CLI::App* sub, OperatorArgs& o)
{
    sub->add_option("--operator", o.kind, "kron or dense")->check(CLI::IsMember({"kron", "dense"}));
    sub->add_option("--kron", o.kron_dir, "Kronecker-sum directory written by approx");
    sub->add_option("--matrix", o.matrix, "dense blur matrix (mtx)");
    sub->add_option("--psf", o.psf, "PSF (mtx) to build the dense matrix from");
    sub->add_option("--bc", o.bc, "boundary condition for --psf")->check(CLI::IsMember({"zero", "reflexive"}));
}

void add_sb_options(CLI::App* sub, SbArgs& s, bool with_lambda)
{
    sub->add_option("--variant", s.variant, "aniso or iso")->check(CLI::IsMember({"aniso", "iso"}));
    if (with_lambda)
        sub->add_option("--lambda", s.lambda, "regularization parameter lambda")->required();
    sub->add_option("--beta", s.beta, "shrinkage parameter beta");
    sub->add_option("--gamma", s.gamma, "gamma = lambda^2 / beta");
    sub->add_option("--tau-sb", s.tau_sb, "RC_SB tolerance");
    sub->add_option("--lmax", s.lmax, "maximum outer iterations");
    sub->add_option("--tau-cgls", s.tau_cgls, "RC_CGLS tolerance");
    sub->add_option("--imax", s.imax, "maximum CGLS iterations");
    sub->add_flag("--warm-start", s.warm_start, "start CGLS from the previous outer iterate");
}

// Calls fn(op, info) with the operator selected by `o` for n x n images.
template <class Fn>
void with_operator(const OperatorArgs& o, std::size_t n, Fn&& fn)
{
    json info;
    info["kind"] = o.kind;
    if (o.kind == "kron") {
        if (o.kron_dir.empty())
            throw ValidationError("--operator kron needs --kron DIR");
        const KroneckerSum op = KroneckerSum::load(o.kron_dir);
        if (op.cols() != n * n || op.rows() != n * n)
            throw ValidationError("Kronecker operator does not act on " + std::to_string(n) + "x" + std::to_string(n)
                                  + " images");
        std::ifstream in(fs::path(o.kron_dir) / "meta.json");
        const json meta = json::parse(in, nullptr, false);
        info["k"] = op.num_terms();
        info["k_p"] = meta.value("k_p", op.num_terms());
        info["rho"] = meta.value("engine", std::string("egkb")) == "rsvd" ? 2 : 1;
        info["n1"] = op.scheme().n1;
        info["flops_per_apply"] = op.flops_per_apply();
        fn(op, info);
        return;
    }
    MatrixD a;
    if (!o.matrix.empty())
        a = read_mtx<double>(o.matrix);
    else if (!o.psf.empty())
        a = build_blur_matrix(Psf::centered(read_mtx<double>(o.psf)), n, parse_boundary(o.bc));
    else
        throw ValidationError("--operator dense needs --matrix or --psf");
    if (a.rows() != n * n || a.cols() != n * n)
        throw ValidationError("dense operator does not act on " + std::to_string(n) + "x" + std::to_string(n)
                              + " images");
    const DenseOperator op(std::move(a));
    fn(op, info);
}

json predicted_json(const json& info, std::size_t n, std::size_t iota_total)
{
    if (info.value("kind", "") != "kron")
        return nullptr;
    CostModel cm = CostModel::square(n, info["k"].get<std::size_t>(),
                                     info["k_p"].get<std::size_t>() - info["k"].get<std::size_t>(),
                                     info["rho"].get<std::size_t>(), iota_total);
    const auto s = predict_speedups(cm);
    return {{"sb_speedup", s.sb_speedup}, {"alg_speedup", s.alg_speedup}, {"alg_speedup_note", s.alg_speedup_note}};
}

struct DeblurArgs {
    std::string b;
    std::string truth;
    std::string b_true;
    std::string out_image;
    std::string metrics;
    int bits = 8;
    OperatorArgs op;
    SbArgs sb;
};

void run_deblur(const DeblurArgs& a, const CLI::App& sub)
{
    std::size_t n = 0;
    const VectorD b = load_image(a.b, n);
    std::optional<VectorD> truth;
    if (!a.truth.empty())
        truth = load_image_sized(a.truth, n);
    const SbConfig cfg = a.sb.config(a.sb.lambda);

    with_operator(a.op, n, [&](const auto& op, const json& info) {
        const auto t0 = std::chrono::steady_clock::now();
        const SbResult res = truth ? sb_run(op, b, cfg, std::span<const double>(*truth)) : sb_run(op, b, cfg);
        const double secs = seconds_since(t0);

        json m;
        m["config"] = effective_config(sub);
        m["operator"] = info;
        m["snr_db"] = nullptr;
        if (!a.b_true.empty())
            m["snr_db"] = db_json(snr_db(load_image_sized(a.b_true, n), b));
        m["re"] = res.re;
        m["isnr_db"] = db_array(res.isnr_db);
        m["rc_sb"] = res.rc_sb;
        m["cgls_iters"] = res.cgls_iters;
        m["iota_total"] = res.iota_total;
        m["ell_end"] = res.state.ell;
        m["converged"] = res.converged;
        m["flops"] = {{"kp_apply", res.flops.kp_apply}, {"dense_apply", res.flops.dense_apply}};
        m["predicted"] = predicted_json(info, n, res.iota_total);
        m["seconds"] = secs;

        if (!a.out_image.empty())
            save_image(a.out_image, res.x(), n, a.bits);
        if (!a.metrics.empty())
            write_json(a.metrics, m);
        std::cout << "deblur: variant=" << a.sb.variant << " ell=" << res.state.ell
                  << " iota_total=" << res.iota_total;
        if (!res.re.empty())
            std::cout << " re=" << res.re.back();
        std::cout << '\n';
    });
}

struct SweepArgs {
    std::string b;
    std::string truth;
    std::string out;
    double lambda_min = 1e-2;
    double lambda_max = 10;
    std::size_t points = 100;
    OperatorArgs op;
    SbArgs sb;
};

std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    if (!(lo > 0) || !(hi >= lo) || points == 0)
        throw ValidationError("lambda grid needs 0 < lambda-min <= lambda-max and points >= 1");
    std::vector<double> g(points);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = points == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    g.front() = lo;
    if (points > 1)
        g.back() = hi;
    return g;
}

void run_sweep(const SweepArgs& a, const CLI::App&)
{
    std::size_t n = 0;
    const VectorD b = load_image(a.b, n);
    std::optional<VectorD> truth;
    if (!a.truth.empty())
        truth = load_image_sized(a.truth, n);
    const std::vector<double> grid = log_grid(a.lambda_min, a.lambda_max, a.points);

    std::ofstream csv;
    std::ostream* out = &std::cout;
    if (!a.out.empty()) {
        csv.open(a.out);
        if (!csv)
            throw IoError("cannot write " + a.out);
        out = &csv;
    }
    *out << "lambda,beta,re,isnr_db,ell_end,iota_total,rc_monotone\n" << std::setprecision(17);

    with_operator(a.op, n, [&](const auto& op, const json&) {
        double best_re = std::numeric_limits<double>::infinity();
        double best_lambda = 0;
        for (double lam : grid) {
            const SbConfig cfg = a.sb.config(lam);
            const SbResult res = truth ? sb_run(op, b, cfg, std::span<const double>(*truth)) : sb_run(op, b, cfg);
            const bool monotone = std::is_sorted(res.rc_sb.rbegin(), res.rc_sb.rend());
            const double re = res.re.empty() ? std::nan("") : res.re.back();
            const double isnr = res.isnr_db.empty() ? std::nan("") : res.isnr_db.back();
            *out << lam << ',' << cfg.beta_x << ',' << re << ',' << isnr << ',' << res.state.ell << ','
                 << res.iota_total << ',' << (monotone ? 1 : 0) << '\n';
            if (re < best_re) {
                best_re = re;
                best_lambda = lam;
            }
        }
        if (truth)
            std::cerr << "sweep: best lambda=" << best_lambda << " re=" << best_re << '\n';
    });
}

struct MetricsArgs {
    std::string x, b, truth, b_true, out;
    std::size_t n = 0, k = 0, p = 2, rho = 1, iota_total = 0;
};

void run_metrics(const MetricsArgs& a, const CLI::App& sub)
{
    json m;
    m["config"] = effective_config(sub);
    std::size_t n = 0;
    std::optional<VectorD> x, b, truth, b_true;
    if (!a.x.empty())
        x = load_image(a.x, n);
    if (!a.b.empty())
        b = n ? load_image_sized(a.b, n) : load_image(a.b, n);
    if (!a.truth.empty())
        truth = n ? load_image_sized(a.truth, n) : load_image(a.truth, n);
    if (!a.b_true.empty())
        b_true = n ? load_image_sized(a.b_true, n) : load_image(a.b_true, n);
    if (b && b_true)
        m["snr_db"] = db_json(snr_db(*b_true, *b));
    if (x && truth)
        m["re"] = relative_error(*x, *truth);
    if (x && b && truth)
        m["isnr_db"] = db_json(isnr_db(*x, *b, *truth));
    if (a.k > 0) {
        const std::size_t side = a.n ? a.n : n;
        if (side == 0)
            throw ValidationError("cost model needs --n or an image");
        const auto s = predict_speedups(CostModel::square(side, a.k, a.p, a.rho, a.iota_total));
        m["predicted"] = {{"sb_speedup", s.sb_speedup},
                          {"alg_speedup", s.alg_speedup},
                          {"alg_speedup_note", s.alg_speedup_note}};
    }
    if (a.out.empty())
        std::cout << m.dump(2) << '\n';
    else
        write_json(a.out, m);
}

// Splits "--config FILE" / "--config=FILE" off the arguments.
std::optional<std::string> take_config(std::vector<std::string>& args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            std::string path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            return path;
        }
        if (args[i].starts_with("--config=")) {
            std::string path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            return path;
        }
    }
    return std::nullopt;
}

int run(int argc, char** argv)
{
    CLI::App app{"Kronecker-sum blur approximation and Split Bregman deblurring"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", "kpsb 0.1.0");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "blur and add noise to an image");
    s->add_option("--image", sim.image, "input image (pgm or mtx); a phantom is used if absent");
    s->add_option("--phantom", sim.phantom, "phantom side when no --image is given");
    s->add_option("--psf", sim.psf, "PSF kernel (mtx, odd dimensions)");
    s->add_option("--psf-size", sim.psf_size, "side of the synthetic speckle PSF");
    s->add_option("--roughness", sim.roughness, "speckle weight of the synthetic PSF, (0, 1]");
    s->add_option("--psf-seed", sim.psf_seed, "seed of the synthetic PSF");
    s->add_option("--bc", sim.bc, "boundary condition")->check(CLI::IsMember({"zero", "reflexive"}));
    s->add_option("--noise", sim.noise, "noise level ||eta|| / ||b_true||");
    s->add_option("--seed", sim.seed, "noise seed");
    s->add_option("--out-dir", sim.out_dir, "output directory")->required();
    s->add_flag("--emit-matrix", sim.emit_matrix, "also write the dense blur matrix A.mtx");
    s->add_option("--bits", sim.bits, "PGM depth")->check(CLI::IsMember({8, 16}));

    ApproxArgs apx;
    auto* x = app.add_subcommand("approx", "Kronecker-sum approximation of a blur matrix");
    x->add_option("--matrix", apx.matrix, "dense blur matrix (mtx)");
    x->add_option("--psf", apx.psf, "PSF (mtx) to build the matrix from");
    x->add_option("--n", apx.n, "image side for --psf");
    x->add_option("--bc", apx.bc, "boundary condition for --psf")->check(CLI::IsMember({"zero", "reflexive"}));
    x->add_option("--m1", apx.m1, "block rows");
    x->add_option("--m2", apx.m2, "rows per block");
    x->add_option("--n1", apx.n1, "block columns");
    x->add_option("--n2", apx.n2, "columns per block");
    x->add_option("--engine", apx.engine, "egkb or rsvd")->check(CLI::IsMember({"egkb", "rsvd"}));
    x->add_option("--prec", apx.prec, "single or double")->check(CLI::IsMember({"single", "double"}));
    x->add_option("--kmax", apx.kmax, "largest rank EGKB may choose");
    x->add_option("--p", apx.p, "oversampling");
    x->add_option("--tau-egkb", apx.tau_egkb, "nu tolerance of the rank rule");
    x->add_option("--kmin", apx.kmin, "smallest rank the rule may choose");
    x->add_option("--seed", apx.seed, "seed of the starting vector / sketch");
    x->add_option("--reorth", apx.reorth, "auto, one-sided or full")
        ->check(CLI::IsMember({"auto", "one-sided", "full"}));
    x->add_option("--k", apx.k, "RSVD rank (0: estimate with EGKB)");
    x->add_option("--q", apx.q, "RSVD power iterations");
    x->add_option("--out-dir", apx.out_dir, "output directory")->required();

    DeblurArgs dbl;
    auto* d = app.add_subcommand("deblur", "Split Bregman TV restoration");
    d->add_option("--b", dbl.b, "observed image (pgm or mtx)")->required();
    d->add_option("--truth", dbl.truth, "true image for RE / ISNR");
    d->add_option("--b-true", dbl.b_true, "noise-free blurred image for SNR");
    d->add_option("--out-image", dbl.out_image, "restored image stem (.pgm and .mtx are written)");
    d->add_option("--metrics", dbl.metrics, "metrics JSON path");
    d->add_option("--bits", dbl.bits, "PGM depth")->check(CLI::IsMember({8, 16}));
    add_operator_options(d, dbl.op);
    add_sb_options(d, dbl.sb, true);

    SweepArgs swp;
    auto* w = app.add_subcommand("sweep", "lambda sweep at fixed gamma");
    w->add_option("--b", swp.b, "observed image (pgm or mtx)")->required();
    w->add_option("--truth", swp.truth, "true image for RE / ISNR");
    w->add_option("--out", swp.out, "CSV path (stdout if absent)");
    w->add_option("--lambda-min", swp.lambda_min, "smallest lambda");
    w->add_option("--lambda-max", swp.lambda_max, "largest lambda");
    w->add_option("--points", swp.points, "number of log-spaced lambdas");
    add_operator_options(w, swp.op);
    add_sb_options(w, swp.sb, false);

    MetricsArgs met;
    auto* m = app.add_subcommand("metrics", "image metrics and predicted speedups");
    m->add_option("--x", met.x, "restored image");
    m->add_option("--b", met.b, "observed image");
    m->add_option("--truth", met.truth, "true image");
    m->add_option("--b-true", met.b_true, "noise-free blurred image");
    m->add_option("--n", met.n, "image side for the cost model");
    m->add_option("--k", met.k, "Kronecker terms (enables the cost model)");
    m->add_option("--p", met.p, "oversampling");
    m->add_option("--rho", met.rho, "1 for EGKB, 2 for RSVD")->check(CLI::IsMember({1, 2}));
    m->add_option("--iota-total", met.iota_total, "total CGLS iterations");
    m->add_option("--out", met.out, "JSON path (stdout if absent)");

    std::vector<std::string> args(argv + 1, argv + argc);
    if (const auto cfg_path = take_config(args)) {
        CLI::App* sub = args.empty() ? nullptr : app.get_subcommand_no_throw(args.front());
        if (!sub)
            throw ValidationError("--config must follow a subcommand");
        ConfigEntries known;
        for (auto& kv : read_config(*cfg_path)) {
            if (sub->get_option_no_throw("--" + kv.first))
                known.push_back(std::move(kv));
            else
                std::cerr << "warning: config key '" << kv.first << "' is not an option of " << args.front() << '\n';
        }
        args = merge_config(args, known);
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (s->parsed())
        run_simulate(sim, *s);
    else if (x->parsed())
        run_approx(apx, *x);
    else if (d->parsed())
        run_deblur(dbl, *d);
    else if (w->parsed())
        run_sweep(swp, *w);
    else if (m->parsed())
        run_metrics(met, *m);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
