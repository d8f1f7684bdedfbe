#include "qsshift/shift_solver.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <utility>

namespace qss {

namespace {

std::atomic<std::uint64_t> g_shared_factorize_count{0};
std::atomic<unsigned> g_worker_override{0};

std::string complex_str(cplx z) {
    return "(" + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
           std::to_string(z.imag()) + "j)";
}

}  // namespace

std::uint64_t shared_factorize_count() {
    return g_shared_factorize_count.load(std::memory_order_relaxed);
}

SharedFactorization shared_factorize(const QSMatrix& a) {
    g_shared_factorize_count.fetch_add(1, std::memory_order_relaxed);
    const std::size_t n = a.blocks();
    const auto& s = a.structure();

    SharedFactorization f;
    f.structure = s;
    f.rho.assign(n + 1, 0);
    for (std::size_t k = n; k > 1; --k)
        f.rho[k - 1] = std::min(s.m[k - 1] + f.rho[k], s.rl[k - 1]);
    f.nu.resize(n);
    for (std::size_t k = 0; k < n; ++k) f.nu[k] = s.m[k] + f.rho[k + 1] - f.rho[k];
    f.rho_prime.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) f.rho_prime[j] = f.rho[j] + s.ru[j];

    f.V.reserve(n);
    f.V.assign(n, QRFactors(DenseMatrix(0, 0)));
    f.PV.assign(n, DenseMatrix());
    f.LaV.assign(n, DenseMatrix());
    f.XiV.assign(n, DenseMatrix());
    f.QV.assign(n, DenseMatrix());
    f.HT.assign(n, DenseMatrix());
    f.ThT.assign(n, DenseMatrix());
    f.LaT.assign(n, DenseMatrix());
    f.GT.assign(n, DenseMatrix());
    f.Gam.assign(n, DenseMatrix());
    f.X.assign(n, DenseMatrix());

    // Backward sweep: compress the lower generator chain block by block.
    for (std::size_t kk = n; kk > 1; --kk) {
        const std::size_t k = kk - 1;  // current block, k >= 1
        const std::size_t mk = s.m[k];
        DenseMatrix stacked = (k + 1 == n)
                                  ? a.P(k)
                                  : vstack(a.P(k), multiply(f.X[k + 1], a.Xi(k)));
        f.V[k] = qr(stacked);
        f.X[k] = slice(f.V[k].r(), 0, f.rho[k], 0, s.rl[k]);

        const DenseMatrix vq = f.V[k].q();  // (m[k] + rho[k+1]) square
        const std::size_t p = vq.rows();
        f.PV[k] = slice(vq, 0, mk, 0, f.rho[k]);
        f.LaV[k] = slice(vq, 0, mk, f.rho[k], p - f.rho[k]);
        f.XiV[k] = slice(vq, mk, p - mk, 0, f.rho[k]);
        f.QV[k] = slice(vq, mk, p - mk, f.rho[k], p - f.rho[k]);

        if (k + 1 == n) {
            // Last block: only the diagonal generator feeds the triangular part.
            const DenseMatrix w = f.V[k].apply_adjoint(a.Lambda(k));
            f.HT[k] = vstack(a.H(k), slice(w, 0, f.rho[k], 0, mk));
            f.LaT[k] = slice(w, f.rho[k], w.rows() - f.rho[k], 0, mk);
        } else {
            // Interior block: transform [Lambda G 0; X Q 0 I] and stack the
            // untouched upper generators on top, then split into the four
            // triangular-factor generators.
            const std::size_t rho_next = f.rho[k + 1];
            DenseMatrix body(mk + rho_next, mk + s.ru[k + 1] + rho_next);
            set_block(body, 0, 0, a.Lambda(k));
            set_block(body, 0, mk, a.G(k));
            set_block(body, mk, 0, multiply(f.X[k + 1], a.Q(k)));
            set_block(body, mk, mk + s.ru[k + 1], DenseMatrix::identity(rho_next));
            f.V[k].apply_adjoint_inplace(body);

            DenseMatrix top(s.ru[k], body.cols());
            set_block(top, 0, 0, a.H(k));
            set_block(top, 0, mk, a.Theta(k));
            const DenseMatrix full = vstack(top, body);

            const std::size_t rp = f.rho_prime[k];
            f.HT[k] = slice(full, 0, rp, 0, mk);
            f.ThT[k] = slice(full, 0, rp, mk, full.cols() - mk);
            f.LaT[k] = slice(full, rp, full.rows() - rp, 0, mk);
            f.GT[k] = slice(full, rp, full.rows() - rp, mk, full.cols() - mk);
        }
        f.Gam[k] = vstack(DenseMatrix(s.ru[k], mk), adjoint(f.PV[k]));
    }

    // First block: nothing left to annihilate, V[0] is a trivial identity.
    f.V[0] = qr(DenseMatrix(f.nu[0], 0));
    if (n > 1) {
        f.LaT[0] = vstack(a.Lambda(0), multiply(f.X[1], a.Q(0)));
        DenseMatrix gt(f.nu[0], f.rho_prime[1]);
        set_block(gt, 0, 0, a.G(0));
        set_block(gt, s.m[0], s.ru[1], DenseMatrix::identity(f.rho[1]));
        f.GT[0] = std::move(gt);
    } else {
        f.LaT[0] = a.Lambda(0);
        f.GT[0] = DenseMatrix(f.nu[0], 0);
    }
    DenseMatrix gam0(f.nu[0], s.m[0]);
    set_block(gam0, 0, 0, DenseMatrix::identity(s.m[0]));
    f.Gam[0] = std::move(gam0);
    return f;
}

BlockVector apply_v_adjoint(const SharedFactorization& f, const BlockVector& y) {
    const std::size_t n = f.structure.blocks();
    if (y.blocks.size() != n) throw DimensionError("apply_v_adjoint partition mismatch");
    for (std::size_t k = 0; k < n; ++k)
        if (y.blocks[k].size() != f.structure.m[k])
            throw DimensionError("apply_v_adjoint block size mismatch");

    BlockVector w;
    w.blocks.resize(n);
    std::vector<cplx> carry;  // size rho[k+1] entering block k
    for (std::size_t kk = n; kk > 0; --kk) {
        const std::size_t k = kk - 1;
        std::vector<cplx> vec = y.blocks[k];
        vec.insert(vec.end(), carry.begin(), carry.end());
        if (k >= 1) {
            const std::vector<cplx> out = f.V[k].apply_adjoint(vec);
            carry.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(f.rho[k]));
            w.blocks[k].assign(out.begin() + static_cast<std::ptrdiff_t>(f.rho[k]), out.end());
        } else {
            w.blocks[0] = std::move(vec);
        }
    }
    return w;
}

ShiftFactorization shift_factorize(const SharedFactorization& f, cplx sigma) {
    const std::size_t n = f.structure.blocks();
    const auto& m = f.structure.m;

    ShiftFactorization sf;
    sf.owner = &f;
    sf.sigma = sigma;
    sf.U.reserve(n);
    sf.U.assign(n, QRFactors(DenseMatrix(0, 0)));
    sf.LaR.assign(n, DenseMatrix());
    sf.GR.assign(n, DenseMatrix());
    sf.HTs.assign(n, DenseMatrix());

    DenseMatrix y;  // rho[k] x rho_prime[k] carrier across boundaries
    for (std::size_t k = 0; k < n; ++k) {
        DenseMatrix stacked;
        if (k == 0) {
            stacked = f.LaT[0] + sigma * f.Gam[0];
        } else {
            sf.HTs[k] = f.HT[k] + sigma * f.Gam[k];
            stacked = vstack(multiply(y, sf.HTs[k]), f.LaT[k] + sigma * adjoint(f.LaV[k]));
        }
        sf.U[k] = qr(stacked);
        sf.LaR[k] = slice(sf.U[k].r(), 0, m[k], 0, m[k]);
        if (k + 1 < n) {
            const DenseMatrix coupled =
                (k == 0) ? f.GT[0] : vstack(multiply(y, f.ThT[k]), f.GT[k]);
            const DenseMatrix w = sf.U[k].apply_adjoint(coupled);
            sf.GR[k] = slice(w, 0, m[k], 0, w.cols());
            y = slice(w, m[k], w.rows() - m[k], 0, w.cols());
        }
    }
    return sf;
}

BlockVector apply_u_adjoint(const ShiftFactorization& s, const BlockVector& w) {
    const SharedFactorization& f = *s.owner;
    const std::size_t n = f.structure.blocks();
    if (w.blocks.size() != n) throw DimensionError("apply_u_adjoint partition mismatch");
    for (std::size_t k = 0; k < n; ++k)
        if (w.blocks[k].size() != f.nu[k])
            throw DimensionError("apply_u_adjoint block size mismatch");

    BlockVector v;
    v.blocks.resize(n);
    std::vector<cplx> alpha;  // size rho[k] entering block k
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<cplx> vec = std::move(alpha);
        vec.insert(vec.end(), w.blocks[k].begin(), w.blocks[k].end());
        const std::vector<cplx> out = s.U[k].apply_adjoint(vec);
        const std::size_t mk = f.structure.m[k];
        v.blocks[k].assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(mk));
        alpha.assign(out.begin() + static_cast<std::ptrdiff_t>(mk), out.end());
    }
    return v;
}

BlockVector backsubstitute(const ShiftFactorization& s, const BlockVector& v) {
    const SharedFactorization& f = *s.owner;
    const std::size_t n = f.structure.blocks();
    if (v.blocks.size() != n) throw DimensionError("backsubstitute partition mismatch");

    auto solve_block = [&](std::size_t k, const std::vector<cplx>& rhs) {
        try {
            return solve_upper(s.LaR[k], rhs);
        } catch (const SingularDiagonal&) {
            throw SingularShift(SingularShift::npos, k,
                                "shifted matrix is singular at shift " + complex_str(s.sigma) +
                                    ", block " + std::to_string(k));
        }
    };

    BlockVector x;
    x.blocks.resize(n);
    x.blocks[n - 1] = solve_block(n - 1, v.blocks[n - 1]);
    if (n == 1) return x;

    std::vector<cplx> eta = mat_vec(s.HTs[n - 1], x.blocks[n - 1]);
    for (std::size_t kk = n - 1; kk > 1; --kk) {
        const std::size_t k = kk - 1;
        std::vector<cplx> rhs = v.blocks[k];
        const std::vector<cplx> corr = mat_vec(s.GR[k], eta);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= corr[i];
        x.blocks[k] = solve_block(k, rhs);
        std::vector<cplx> eta_prev = mat_vec(f.ThT[k], eta);
        const std::vector<cplx> shifted = mat_vec(s.HTs[k], x.blocks[k]);
        for (std::size_t i = 0; i < eta_prev.size(); ++i) eta_prev[i] += shifted[i];
        eta = std::move(eta_prev);
    }
    std::vector<cplx> rhs = v.blocks[0];
    const std::vector<cplx> corr = mat_vec(s.GR[0], eta);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= corr[i];
    x.blocks[0] = solve_block(0, rhs);
    return x;
}

BlockVector solve_shifted(const SharedFactorization& f, cplx sigma, const BlockVector& y) {
    const BlockVector w = apply_v_adjoint(f, y);
    const ShiftFactorization s = shift_factorize(f, sigma);
    const BlockVector v = apply_u_adjoint(s, w);
    return backsubstitute(s, v);
}

namespace detail {

void set_solver_workers(unsigned n) { g_worker_override.store(n, std::memory_order_relaxed); }

unsigned solver_workers() {
    const unsigned forced = g_worker_override.load(std::memory_order_relaxed);
    if (forced > 0) return forced;
    if (const char* env = std::getenv("QSSHIFT_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min(hw, 8u);
}

}  // namespace detail

namespace {

std::vector<BlockVector> solve_all(const SharedFactorization& f, const std::vector<cplx>& shifts,
                                   const std::vector<BlockVector>& rhs) {
    if (shifts.size() != rhs.size())
        throw DimensionError("solve_many needs one right-hand side per shift");
    if (shifts.empty()) throw InvalidArgument("solve_many needs at least one shift");
    const std::size_t count = shifts.size();
    std::vector<BlockVector> results(count);
    std::vector<std::exception_ptr> errors(count);

    auto run_one = [&](std::size_t i) {
        try {
            try {
                results[i] = solve_shifted(f, shifts[i], rhs[i]);
            } catch (const SingularShift& e) {
                throw SingularShift(i, e.block(),
                                    std::string(e.what()) + " (shift index " +
                                        std::to_string(i) + ")");
            }
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(detail::solver_workers(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) return;
                run_one(i);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
    return results;
}

}  // namespace

std::vector<BlockVector> solve_many(const SharedFactorization& f, const std::vector<cplx>& shifts,
                                    const std::vector<BlockVector>& rhs) {
    return solve_all(f, shifts, rhs);
}

std::vector<BlockVector> solve_many(const QSMatrix& a, const std::vector<cplx>& shifts,
                                    const std::vector<BlockVector>& rhs) {
    const SharedFactorization f = shared_factorize(a);
    return solve_all(f, shifts, rhs);
}

std::vector<BlockVector> solve_sequential_baseline(const QSMatrix& a,
                                                   const std::vector<cplx>& shifts,
                                                   const std::vector<BlockVector>& rhs) {
    if (shifts.size() != rhs.size())
        throw DimensionError("solve_sequential_baseline needs one right-hand side per shift");
    if (shifts.empty())
        throw InvalidArgument("solve_sequential_baseline needs at least one shift");
    std::vector<BlockVector> results(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        const SharedFactorization f = shared_factorize(a);
        try {
            results[i] = solve_shifted(f, shifts[i], rhs[i]);
        } catch (const SingularShift& e) {
            throw SingularShift(i, e.block(),
                                std::string(e.what()) + " (shift index " + std::to_string(i) +
                                    ")");
        }
    }
    return results;
}

}  // namespace qss
