// Command-line harness: generic shifted solves over serialized inputs plus
// the canonical experiments (series convergence, matrix square root, Poisson
// matrix equation, timing benchmarks), all emitting CSV.
//
// Exit codes: 0 success, 1 usage/input error, 2 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qsshift/io.hpp>
#include <qsshift/matfun.hpp>
#include <qsshift/reference.hpp>
#include <qsshift/shift_solver.hpp>
#include <qsshift/sylvester.hpp>

using qss::BlockVector;
using qss::cplx;
using qss::DenseMatrix;
using qss::QSMatrix;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log10(x[i]), ly = std::log10(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Slope of log10(y) against plain x (geometric decay rate per unit x).
double semilog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ly = std::log10(std::max(y[i], 1e-300));
        sx += x[i];
        sy += ly;
        sxx += x[i] * x[i];
        sxy += x[i] * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string token;
    std::stringstream ss(s);
    while (std::getline(ss, token, ',')) {
        const auto b = token.find_first_not_of(" \t");
        const auto e = token.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(token.substr(b, e - b + 1));
    }
    return out;
}

std::vector<cplx> parse_complex_list(const std::string& s) {
    std::vector<cplx> out;
    for (const auto& tok : split_list(s)) out.push_back(qss::parse_complex(tok));
    if (out.empty()) throw qss::ParseError("empty list: '" + s + "'");
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& tok : split_list(s)) {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(tok, &pos);
        if (pos != tok.size()) throw qss::ParseError("bad integer token: '" + tok + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw qss::ParseError("empty list: '" + s + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split_list(s)) {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw qss::ParseError("bad number token: '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw qss::ParseError("empty list: '" + s + "'");
    return out;
}

// Geometric grid of distinct integers from lo to hi inclusive.
std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, std::size_t points) {
    std::set<std::size_t> grid;
    for (std::size_t i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        const double v = std::exp(std::log(static_cast<double>(lo)) * (1 - f) +
                                  std::log(static_cast<double>(hi)) * f);
        grid.insert(static_cast<std::size_t>(std::lround(v)));
    }
    return {grid.begin(), grid.end()};
}

BlockVector random_rhs(qss::UniformRng& rng, const std::vector<std::size_t>& sizes) {
    std::size_t total = 0;
    for (std::size_t s : sizes) total += s;
    std::vector<cplx> flat(total);
    for (auto& z : flat) z = cplx(rng.next_symmetric(), rng.next_symmetric());
    return BlockVector::from_flat(flat, sizes);
}

// Output sink: --out file if given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw qss::ParseError("cannot open output file: " + path);
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// ---- solve ---------------------------------------------------------------------

int cmd_solve(const std::string& matrix_path, const std::string& shifts_arg,
              const std::string& rhs_path, const std::string& out_path) {
    QSMatrix a = qss::load_qs(matrix_path);
    std::vector<cplx> shifts = parse_complex_list(shifts_arg);

    std::vector<BlockVector> rhs;
    try {
        rhs = qss::load_block_vectors(rhs_path);
    } catch (const qss::ParseError&) {
        rhs = {qss::load_block_vector(rhs_path)};
    }
    if (rhs.size() == 1 && shifts.size() > 1) rhs.assign(shifts.size(), rhs[0]);
    if (rhs.size() != shifts.size())
        throw qss::ParseError("rhs count (" + std::to_string(rhs.size()) +
                              ") does not match shift count (" +
                              std::to_string(shifts.size()) + ")");

    std::vector<BlockVector> xs = qss::solve_many(a, shifts, rhs);
    if (!out_path.empty()) qss::save_block_vectors(xs, out_path);

    std::cout.precision(17);
    std::cout << "shift_re,shift_im,rel_residual\n";
    for (std::size_t s = 0; s < shifts.size(); ++s) {
        BlockVector r = qss::matvec(a, xs[s]);
        qss::axpy_inplace(r, shifts[s], xs[s]);
        qss::axpy_inplace(r, cplx(-1.0), rhs[s]);
        const double denom = qss::norm2(rhs[s]);
        const double resid = qss::norm2(r) / (denom > 0 ? denom : 1.0);
        std::cout << shifts[s].real() << "," << shifts[s].imag() << "," << resid << "\n";
    }
    if (!out_path.empty())
        std::cerr << "wrote " << xs.size() << " solution vector(s) to " << out_path << "\n";
    return 0;
}

// ---- bvp -----------------------------------------------------------------------

int cmd_bvp(std::size_t n, const std::string& t_arg, std::size_t lmax,
            const std::string& variant, std::uint64_t seed, const std::string& out_path) {
    if (n == 0) throw qss::InvalidArgument("--n must be positive");
    if (lmax < 10) throw qss::InvalidArgument("--lmax must be at least 10");
    const bool want_plain = variant == "plain" || variant == "both";
    const bool want_accel = variant == "accel" || variant == "both";
    if (!want_plain && !want_accel)
        throw qss::InvalidArgument("--variant must be plain, accel, or both");
    std::vector<double> ts = parse_double_list(t_arg);

    std::vector<cplx> off(n > 1 ? n - 1 : 0, -1.0), diag(n, 2.0);
    QSMatrix a = qss::from_tridiagonal(off, diag, off);
    qss::UniformRng rng(seed);
    std::vector<cplx> gflat(n);
    for (auto& z : gflat) z = rng.next_unit();
    BlockVector g = BlockVector::from_flat(gflat, a.structure().m);
    qss::BVPContext ctx = qss::make_bvp_context(a, g);

    const std::vector<std::size_t> ells = log_grid(10, lmax, 8);
    Sink sink(out_path);
    std::ostream& os = sink.out();
    os.precision(17);
    os << "t,ell";
    if (want_plain) os << ",err_plain";
    if (want_accel) os << ",err_accel";
    os << "\n";

    for (double t : ts) {
        BlockVector exact = qss::bvp_exact_dense(ctx, t);
        std::vector<double> xs, ep, ea;
        for (std::size_t ell : ells) {
            os << t << "," << ell;
            xs.push_back(static_cast<double>(ell));
            if (want_plain) {
                BlockVector d = qss::bvp_series_plain(ctx, t, ell, 0.0);
                qss::axpy_inplace(d, cplx(-1.0), exact);
                ep.push_back(qss::norm2(d));
                os << "," << ep.back();
            }
            if (want_accel) {
                BlockVector d = qss::bvp_series_accel(ctx, t, ell, 0.0);
                qss::axpy_inplace(d, cplx(-1.0), exact);
                ea.push_back(qss::norm2(d));
                os << "," << ea.back();
            }
            os << "\n";
        }
        // Slope over the tail of the grid (terms >= 50 when available).
        std::vector<double> xt, pt, at;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (xs[i] >= 50.0 || xs.back() < 50.0) {
                xt.push_back(xs[i]);
                if (want_plain) pt.push_back(ep[i]);
                if (want_accel) at.push_back(ea[i]);
            }
        std::cerr << "t=" << t << ":";
        if (want_plain && xt.size() >= 2)
            std::cerr << " plain slope " << loglog_slope(xt, pt);
        if (want_accel && xt.size() >= 2)
            std::cerr << " accel slope " << loglog_slope(xt, at);
        std::cerr << "\n";
    }
    return 0;
}

// ---- sqrt ----------------------------------------------------------------------

int cmd_sqrt(std::size_t n, double c, int method, const std::string& l_arg,
             const std::string& out_path) {
    std::vector<std::size_t> ells = parse_size_list(l_arg);
    QSMatrix a = qss::convection_diffusion_2d(n, c);
    qss::SpectrumInterval iv = qss::convection_diffusion_spectrum(n, c);
    const std::size_t total = a.structure().total();

    BlockVector b = BlockVector::from_flat(std::vector<cplx>(total, 1.0), a.structure().m);
    DenseMatrix root = c == 0.0
                           ? qss::dense_sqrt_symmetric(qss::to_dense(a), total)
                           : qss::dense_sqrt_iterative(qss::to_dense(a), 1e-13, 50, total);
    std::vector<cplx> ref = qss::mat_vec(root, b.flatten());
    const double ref_norm = qss::norm2(ref);

    Sink sink(out_path);
    std::ostream& os = sink.out();
    os.precision(17);
    os << "ell,rel_error\n";
    std::vector<double> xs, es;
    for (std::size_t ell : ells) {
        qss::RationalApproximation ra = qss::sqrt_poles(method, ell, iv.lo, iv.hi);
        std::vector<cplx> approx = qss::rational_apply(a, b, ra).flatten();
        double acc = 0;
        for (std::size_t i = 0; i < approx.size(); ++i) acc += std::norm(approx[i] - ref[i]);
        const double err = std::sqrt(acc) / ref_norm;
        os << ell << "," << err << "\n";
        xs.push_back(static_cast<double>(ell));
        es.push_back(err);
    }
    if (xs.size() >= 2)
        std::cerr << "geometric decay: log10(error) slope " << semilog_slope(xs, es)
                  << " per unit ell\n";
    return 0;
}

// ---- poisson -------------------------------------------------------------------

int cmd_poisson(std::size_t na, std::size_t nb, const std::string& out_path) {
    const double t0 = now_seconds();
    qss::PoissonResult r = qss::poisson_demo(na, nb);
    const double elapsed = now_seconds() - t0;
    Sink sink(out_path);
    std::ostream& os = sink.out();
    os.precision(17);
    os << "na,nb,rel_error,oracle_available,seconds\n";
    os << na << "," << nb << "," << (r.error_available ? r.relative_error : -1.0) << ","
       << (r.error_available ? 1 : 0) << "," << elapsed << "\n";
    return 0;
}

// ---- benchmarks ----------------------------------------------------------------

int cmd_bench_n(const std::string& sizes_arg, std::size_t r, std::size_t n_shifts,
                std::size_t trials, std::uint64_t seed, const std::string& out_path) {
    if (trials == 0) throw qss::InvalidArgument("--trials must be positive");
    std::vector<std::size_t> sizes = parse_size_list(sizes_arg);
    qss::detail::set_solver_workers(1);
    Sink sink(out_path);
    std::ostream& os = sink.out();
    os.precision(6);
    os << "N,fast_seconds,sequential_seconds,ratio\n";
    for (std::size_t n : sizes) {
        QSMatrix a = qss::random_qs(n, 1, r, r, seed + n);
        qss::UniformRng rng(seed + 7 * n + 1);
        std::vector<cplx> shifts;
        std::vector<BlockVector> rhs;
        for (std::size_t s = 0; s < n_shifts; ++s) {
            shifts.push_back(cplx(9.0 + rng.next_unit(), 1.0 + rng.next_unit()));
            rhs.push_back(random_rhs(rng, a.structure().m));
        }
        auto run_fast = [&] { (void)qss::solve_many(a, shifts, rhs); };
        auto run_seq = [&] { (void)qss::solve_sequential_baseline(a, shifts, rhs); };
        run_fast();  // warm-up excluded
        run_seq();
        std::vector<double> tf, tq;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            double t0 = now_seconds();
            run_fast();
            tf.push_back(now_seconds() - t0);
            t0 = now_seconds();
            run_seq();
            tq.push_back(now_seconds() - t0);
        }
        const double mf = median(tf), ms = median(tq);
        os << n << "," << mf << "," << ms << "," << ms / mf << "\n";
    }
    qss::detail::set_solver_workers(0);
    return 0;
}

int cmd_bench_m(const std::string& blocks_arg, std::size_t n_blocks, std::size_t ell,
                std::size_t trials, std::uint64_t seed, const std::string& out_path) {
    if (trials == 0) throw qss::InvalidArgument("--trials must be positive");
    std::vector<std::size_t> blocks = parse_size_list(blocks_arg);
    qss::detail::set_solver_workers(1);
    Sink sink(out_path);
    std::ostream& os = sink.out();
    os.precision(6);
    os << "m,seconds\n";
    std::vector<double> xs, ts;
    for (std::size_t m : blocks) {
        QSMatrix a = qss::random_qs(n_blocks, m, 1, 1, seed + m);
        qss::UniformRng rng(seed + 11 * m + 3);
        std::vector<cplx> shifts;
        std::vector<BlockVector> rhs;
        for (std::size_t s = 0; s < ell; ++s) {
            shifts.push_back(cplx(9.0 + rng.next_unit(), 1.0 + rng.next_unit()));
            rhs.push_back(random_rhs(rng, a.structure().m));
        }
        auto run = [&] {
            qss::SharedFactorization f = qss::shared_factorize(a);
            (void)qss::solve_many(f, shifts, rhs);
        };
        run();  // warm-up excluded
        std::vector<double> trial_times;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const double t0 = now_seconds();
            run();
            trial_times.push_back(now_seconds() - t0);
        }
        const double t = median(trial_times);
        os << m << "," << t << "\n";
        xs.push_back(static_cast<double>(m));
        ts.push_back(t);
    }
    if (xs.size() >= 2)
        std::cerr << "log-log slope of time vs m: " << loglog_slope(xs, ts) << "\n";
    qss::detail::set_solver_workers(0);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shifted solves and matrix functions for block quasiseparable matrices"};
    app.require_subcommand(1);

    // solve
    std::string matrix_path, shifts_arg, rhs_path, out_path;
    auto* solve = app.add_subcommand("solve", "Solve (A + shift I) x = y for several shifts");
    solve->add_option("--matrix", matrix_path, "matrix representation (JSON)")->required();
    solve->add_option("--shifts", shifts_arg, "comma-separated complex shifts, e.g. '1,0.5+2j'")
        ->required();
    solve->add_option("--rhs", rhs_path, "right-hand side block vector(s) (JSON)")->required();
    solve->add_option("--out", out_path, "write solution vectors to this JSON file");

    // bvp
    std::size_t bvp_n = 100, bvp_lmax = 500;
    std::string bvp_t = "1.5707963267948966";
    std::string bvp_variant = "both";
    std::uint64_t bvp_seed = 1234;
    std::string bvp_out;
    auto* bvp = app.add_subcommand("bvp", "Series solution of the periodic-mean boundary value problem");
    bvp->add_option("--n", bvp_n, "matrix dimension (second-difference operator)");
    bvp->add_option("--t", bvp_t, "comma-separated evaluation times");
    bvp->add_option("--lmax", bvp_lmax, "largest series length in the grid");
    bvp->add_option("--variant", bvp_variant, "plain | accel | both");
    bvp->add_option("--seed", bvp_seed, "rhs seed");
    bvp->add_option("--out", bvp_out, "CSV output file (default stdout)");

    // sqrt
    std::size_t sqrt_n = 20;
    double sqrt_c = 10.0;
    int sqrt_method = 3;
    std::string sqrt_l = "6,8,10,12";
    std::string sqrt_out;
    auto* sq = app.add_subcommand("sqrt", "Square root of the convection-diffusion operator times ones");
    sq->add_option("--n", sqrt_n, "grid size (operator dimension n^2)");
    sq->add_option("--c", sqrt_c, "convection coefficient");
    sq->add_option("--method", sqrt_method, "quadrature construction: 2 or 3");
    sq->add_option("--lvalues", sqrt_l, "comma-separated quadrature degrees");
    sq->add_option("--out", sqrt_out, "CSV output file (default stdout)");

    // poisson
    std::size_t po_na = 10, po_nb = 50;
    std::string po_out;
    auto* po = app.add_subcommand("poisson", "Poisson matrix equation vs the stacked dense oracle");
    po->add_option("--na", po_na, "columns (small dimension)");
    po->add_option("--nb", po_nb, "rows (large dimension)");
    po->add_option("--out", po_out, "CSV output file (default stdout)");

    // bench-n
    std::string bn_sizes = "200,400,800";
    std::size_t bn_r = 3, bn_shifts = 50, bn_trials = 5;
    std::uint64_t bn_seed = 4200;
    std::string bn_out;
    auto* bn = app.add_subcommand("bench-n", "Fast vs sequential-baseline timing over matrix size");
    bn->add_option("--sizes", bn_sizes, "comma-separated block counts");
    bn->add_option("--r", bn_r, "off-diagonal order");
    bn->add_option("--shifts", bn_shifts, "number of shifts");
    bn->add_option("--trials", bn_trials, "timed repetitions (median reported)");
    bn->add_option("--seed", bn_seed, "instance seed");
    bn->add_option("--out", bn_out, "CSV output file (default stdout)");

    // bench-m
    std::string bm_blocks = "200,400,800,1600";
    std::size_t bm_n = 2, bm_ell = 2, bm_trials = 3;
    std::uint64_t bm_seed = 7700;
    std::string bm_out;
    auto* bm = app.add_subcommand("bench-m", "Timing over block size at fixed block count");
    bm->add_option("--blocks", bm_blocks, "comma-separated block sizes");
    bm->add_option("--N", bm_n, "block count");
    bm->add_option("--ell", bm_ell, "number of shifts");
    bm->add_option("--trials", bm_trials, "timed repetitions (median reported)");
    bm->add_option("--seed", bm_seed, "instance seed");
    bm->add_option("--out", bm_out, "CSV output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return cmd_solve(matrix_path, shifts_arg, rhs_path, out_path);
        if (bvp->parsed())
            return cmd_bvp(bvp_n, bvp_t, bvp_lmax, bvp_variant, bvp_seed, bvp_out);
        if (sq->parsed()) return cmd_sqrt(sqrt_n, sqrt_c, sqrt_method, sqrt_l, sqrt_out);
        if (po->parsed()) return cmd_poisson(po_na, po_nb, po_out);
        if (bn->parsed())
            return cmd_bench_n(bn_sizes, bn_r, bn_shifts, bn_trials, bn_seed, bn_out);
        if (bm->parsed())
            return cmd_bench_m(bm_blocks, bm_n, bm_ell, bm_trials, bm_seed, bm_out);
    } catch (const qss::SingularShift& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const qss::SingularDiagonal& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const qss::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
