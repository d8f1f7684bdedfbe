#include "qsshift/core.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace qss {

std::size_t BlockStructure::total() const {
    return std::accumulate(m.begin(), m.end(), std::size_t{0});
}

std::vector<std::size_t> BlockStructure::offsets() const {
    std::vector<std::size_t> off(m.size() + 1, 0);
    for (std::size_t k = 0; k < m.size(); ++k) off[k + 1] = off[k] + m[k];
    return off;
}

namespace {

void check_shape(const DenseMatrix& g, std::size_t rows, std::size_t cols,
                 const char* family, std::size_t k) {
    if (g.rows() != rows || g.cols() != cols)
        throw DimensionError(std::string("generator ") + family + "(" + std::to_string(k) +
                             ") has shape " + std::to_string(g.rows()) + "x" +
                             std::to_string(g.cols()) + ", expected " + std::to_string(rows) +
                             "x" + std::to_string(cols));
}

}  // namespace

QSMatrix::QSMatrix(BlockStructure s, std::vector<DenseMatrix> p, std::vector<DenseMatrix> q,
                   std::vector<DenseMatrix> xi, std::vector<DenseMatrix> g,
                   std::vector<DenseMatrix> h, std::vector<DenseMatrix> theta,
                   std::vector<DenseMatrix> lambda)
    : s_(std::move(s)),
      p_(std::move(p)),
      q_(std::move(q)),
      xi_(std::move(xi)),
      g_(std::move(g)),
      h_(std::move(h)),
      th_(std::move(theta)),
      la_(std::move(lambda)) {
    const std::size_t n = s_.blocks();
    if (n == 0) throw DimensionError("a QSMatrix needs at least one block");
    if (s_.rl.size() != n + 1 || s_.ru.size() != n + 1)
        throw DimensionError("rank arrays must have one entry per block boundary");
    if (s_.rl[0] != 0 || s_.rl[n] != 0 || s_.ru[0] != 0 || s_.ru[n] != 0)
        throw DimensionError("outermost boundary ranks must be zero");
    if (p_.size() != n || q_.size() != n || xi_.size() != n || g_.size() != n ||
        h_.size() != n || th_.size() != n || la_.size() != n)
        throw DimensionError("every generator family needs one entry per block");
    for (std::size_t k = 0; k < n; ++k) {
        check_shape(p_[k], s_.m[k], s_.rl[k], "P", k);
        check_shape(q_[k], s_.rl[k + 1], s_.m[k], "Q", k);
        check_shape(xi_[k], s_.rl[k + 1], s_.rl[k], "Xi", k);
        check_shape(g_[k], s_.m[k], s_.ru[k + 1], "G", k);
        check_shape(h_[k], s_.ru[k], s_.m[k], "H", k);
        check_shape(th_[k], s_.ru[k], s_.ru[k + 1], "Theta", k);
        check_shape(la_[k], s_.m[k], s_.m[k], "Lambda", k);
    }
}

std::size_t BlockVector::total() const {
    std::size_t t = 0;
    for (const auto& b : blocks) t += b.size();
    return t;
}

std::vector<cplx> BlockVector::flatten() const {
    std::vector<cplx> x;
    x.reserve(total());
    for (const auto& b : blocks) x.insert(x.end(), b.begin(), b.end());
    return x;
}

BlockVector BlockVector::from_flat(const std::vector<cplx>& x,
                                   const std::vector<std::size_t>& sizes) {
    std::size_t need = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (need != x.size()) throw DimensionError("flat vector length does not match partition");
    BlockVector out;
    out.blocks.reserve(sizes.size());
    std::size_t pos = 0;
    for (std::size_t s : sizes) {
        out.blocks.emplace_back(x.begin() + pos, x.begin() + pos + s);
        pos += s;
    }
    return out;
}

double norm2(const BlockVector& x) {
    double s = 0.0;
    for (const auto& b : x.blocks)
        for (const cplx& v : b) s += std::norm(v);
    return std::sqrt(s);
}

void axpy_inplace(BlockVector& y, cplx alpha, const BlockVector& x) {
    if (y.blocks.size() != x.blocks.size())
        throw DimensionError("axpy partition mismatch");
    for (std::size_t k = 0; k < y.blocks.size(); ++k) {
        if (y.blocks[k].size() != x.blocks[k].size())
            throw DimensionError("axpy block size mismatch");
        for (std::size_t i = 0; i < y.blocks[k].size(); ++i)
            y.blocks[k][i] += alpha * x.blocks[k][i];
    }
}

BlockVector scaled(cplx alpha, const BlockVector& x) {
    BlockVector y = x;
    for (auto& b : y.blocks)
        for (cplx& v : b) v *= alpha;
    return y;
}

// ---- builders -----------------------------------------------------------------

QSMatrix from_tridiagonal(const std::vector<cplx>& sub, const std::vector<cplx>& diag,
                          const std::vector<cplx>& sup) {
    const std::size_t n = diag.size();
    if (n == 0) throw DimensionError("from_tridiagonal needs at least one diagonal entry");
    if (sub.size() + 1 != n || sup.size() + 1 != n)
        throw DimensionError("from_tridiagonal off-diagonal length mismatch");
    BlockStructure s;
    s.m.assign(n, 1);
    s.rl.assign(n + 1, 1);
    s.ru.assign(n + 1, 1);
    s.rl[0] = s.rl[n] = s.ru[0] = s.ru[n] = 0;
    std::vector<DenseMatrix> p(n), q(n), xi(n), g(n), h(n), th(n), la(n);
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = DenseMatrix(1, s.rl[k]);
        q[k] = DenseMatrix(s.rl[k + 1], 1);
        xi[k] = DenseMatrix(s.rl[k + 1], s.rl[k]);  // zero: couplings do not chain
        g[k] = DenseMatrix(1, s.ru[k + 1]);
        h[k] = DenseMatrix(s.ru[k], 1);
        th[k] = DenseMatrix(s.ru[k], s.ru[k + 1]);  // zero
        la[k] = DenseMatrix(1, 1);
        la[k](0, 0) = diag[k];
        if (k > 0) p[k](0, 0) = sub[k - 1];
        if (k + 1 < n) q[k](0, 0) = cplx(1.0, 0.0);
        if (k + 1 < n) g[k](0, 0) = sup[k];
        if (k > 0) h[k](0, 0) = cplx(1.0, 0.0);
    }
    return QSMatrix(std::move(s), std::move(p), std::move(q), std::move(xi), std::move(g),
                    std::move(h), std::move(th), std::move(la));
}

QSMatrix convection_diffusion_2d(std::size_t n, double c) {
    if (n < 2) throw InvalidArgument("convection_diffusion_2d needs a grid size of at least 2");
    const double step = 1.0 / static_cast<double>(n + 1);
    const double ch = c * step / 2.0;
    BlockStructure s;
    s.m.assign(n, n);
    s.rl.assign(n + 1, n);
    s.ru.assign(n + 1, n);
    s.rl[0] = s.rl[n] = s.ru[0] = s.ru[n] = 0;

    DenseMatrix diag_block(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        diag_block(i, i) = cplx(4.0, 0.0);
        if (i + 1 < n) {
            diag_block(i, i + 1) = cplx(-1.0, 0.0);
            diag_block(i + 1, i) = cplx(-1.0, 0.0);
        }
    }
    const DenseMatrix eye = DenseMatrix::identity(n);

    std::vector<DenseMatrix> p(n), q(n), xi(n), g(n), h(n), th(n), la(n);
    for (std::size_t k = 0; k < n; ++k) {
        la[k] = diag_block;
        p[k] = (k > 0) ? (cplx(-(1.0 + ch), 0.0) * DenseMatrix::identity(n))
                       : DenseMatrix(n, 0);
        q[k] = (k + 1 < n) ? eye : DenseMatrix(0, n);
        xi[k] = DenseMatrix(s.rl[k + 1], s.rl[k]);  // zero: strictly block tridiagonal
        g[k] = (k + 1 < n) ? (cplx(-(1.0 - ch), 0.0) * DenseMatrix::identity(n))
                           : DenseMatrix(n, 0);
        h[k] = (k > 0) ? eye : DenseMatrix(0, n);
        th[k] = DenseMatrix(s.ru[k], s.ru[k + 1]);  // zero
    }
    return QSMatrix(std::move(s), std::move(p), std::move(q), std::move(xi), std::move(g),
                    std::move(h), std::move(th), std::move(la));
}

QSMatrix random_qs(std::size_t n_blocks, std::size_t m, std::size_t r_lower,
                   std::size_t r_upper, std::uint64_t seed) {
    if (n_blocks == 0 || m == 0) throw InvalidArgument("random_qs needs positive sizes");
    BlockStructure s;
    s.m.assign(n_blocks, m);
    s.rl.assign(n_blocks + 1, r_lower);
    s.ru.assign(n_blocks + 1, r_upper);
    s.rl[0] = s.rl[n_blocks] = s.ru[0] = s.ru[n_blocks] = 0;

    UniformRng rng(seed);
    // Fixed draw order (family by family, block by block, row-major within a
    // generator); changing it would silently change every seeded fixture.
    auto draw = [&rng](std::size_t rows, std::size_t cols) {
        DenseMatrix g(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                g(i, j) = cplx(rng.next_symmetric(), 0.0);
        return g;
    };

    const std::size_t n = n_blocks;
    std::vector<DenseMatrix> p(n), q(n), xi(n), g(n), h(n), th(n), la(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = draw(s.m[k], s.rl[k]);
    for (std::size_t k = 0; k < n; ++k) q[k] = draw(s.rl[k + 1], s.m[k]);
    for (std::size_t k = 0; k < n; ++k) xi[k] = draw(s.rl[k + 1], s.rl[k]);
    for (std::size_t k = 0; k < n; ++k) g[k] = draw(s.m[k], s.ru[k + 1]);
    for (std::size_t k = 0; k < n; ++k) h[k] = draw(s.ru[k], s.m[k]);
    for (std::size_t k = 0; k < n; ++k) th[k] = draw(s.ru[k], s.ru[k + 1]);
    for (std::size_t k = 0; k < n; ++k) la[k] = draw(s.m[k], s.m[k]);
    return QSMatrix(std::move(s), std::move(p), std::move(q), std::move(xi), std::move(g),
                    std::move(h), std::move(th), std::move(la));
}

// ---- operations ----------------------------------------------------------------

DenseMatrix to_dense(const QSMatrix& a) {
    const std::size_t n = a.blocks();
    const auto off = a.structure().offsets();
    DenseMatrix d(a.total(), a.total());
    for (std::size_t k = 0; k < n; ++k) set_block(d, off[k], off[k], a.Lambda(k));
    // Lower part: walk each column of blocks upward-to-downward, extending the
    // generator chain one factor at a time.
    for (std::size_t j = 0; j < n; ++j) {
        if (a.structure().rl[j + 1] == 0) continue;
        DenseMatrix chain = a.Q(j);  // rl[j+1] x m[j]
        for (std::size_t i = j + 1; i < n; ++i) {
            set_block(d, off[i], off[j], multiply(a.P(i), chain));
            if (i + 1 < n) chain = multiply(a.Xi(i), chain);
        }
    }
    // Upper part, mirrored.
    for (std::size_t i = 0; i < n; ++i) {
        if (a.structure().ru[i + 1] == 0) continue;
        DenseMatrix chain = a.G(i);  // m[i] x ru[i+1]
        for (std::size_t j = i + 1; j < n; ++j) {
            set_block(d, off[i], off[j], multiply(chain, a.H(j)));
            if (j + 1 < n) chain = multiply(chain, a.Theta(j));
        }
    }
    return d;
}

BlockVector matvec(const QSMatrix& a, const BlockVector& x) {
    const std::size_t n = a.blocks();
    if (x.blocks.size() != n) throw DimensionError("matvec partition mismatch");
    for (std::size_t k = 0; k < n; ++k)
        if (x.blocks[k].size() != a.structure().m[k])
            throw DimensionError("matvec block size mismatch");

    BlockVector y;
    y.blocks.resize(n);
    for (std::size_t k = 0; k < n; ++k) y.blocks[k] = mat_vec(a.Lambda(k), x.blocks[k]);

    // Forward recursion for the lower part: state s entering block k collects
    // Xi-chained history of Q(j) x(j), j < k.
    std::vector<cplx> state;  // size rl[k]
    for (std::size_t k = 0; k < n; ++k) {
        if (a.structure().rl[k] > 0) {
            const std::vector<cplx> contrib = mat_vec(a.P(k), state);
            for (std::size_t i = 0; i < contrib.size(); ++i) y.blocks[k][i] += contrib[i];
        }
        if (k + 1 < n) {
            std::vector<cplx> next = mat_vec(a.Q(k), x.blocks[k]);
            if (a.structure().rl[k] > 0) {
                const std::vector<cplx> carried = mat_vec(a.Xi(k), state);
                for (std::size_t i = 0; i < next.size(); ++i) next[i] += carried[i];
            }
            state = std::move(next);
        }
    }

    // Backward recursion for the upper part.
    std::vector<cplx> tail;  // size ru[k+1]
    for (std::size_t kk = n; kk > 0; --kk) {
        const std::size_t k = kk - 1;
        if (a.structure().ru[k + 1] > 0) {
            const std::vector<cplx> contrib = mat_vec(a.G(k), tail);
            for (std::size_t i = 0; i < contrib.size(); ++i) y.blocks[k][i] += contrib[i];
        }
        if (k > 0) {
            std::vector<cplx> next = mat_vec(a.H(k), x.blocks[k]);
            if (a.structure().ru[k + 1] > 0) {
                const std::vector<cplx> carried = mat_vec(a.Theta(k), tail);
                for (std::size_t i = 0; i < next.size(); ++i) next[i] += carried[i];
            }
            tail = std::move(next);
        }
    }
    return y;
}

std::vector<BlockVector> gemv_powers(const QSMatrix& a, const BlockVector& g, std::size_t p) {
    std::vector<BlockVector> out;
    out.reserve(p + 1);
    out.push_back(g);
    for (std::size_t j = 0; j < p; ++j) out.push_back(matvec(a, out.back()));
    return out;
}

QSMatrix scale(const QSMatrix& a, cplx alpha) {
    const std::size_t n = a.blocks();
    std::vector<DenseMatrix> p(n), q(n), xi(n), g(n), h(n), th(n), la(n);
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = a.P(k);
        q[k] = alpha * a.Q(k);  // lower blocks pick up alpha exactly once
        xi[k] = a.Xi(k);
        g[k] = alpha * a.G(k);  // upper blocks likewise
        h[k] = a.H(k);
        th[k] = a.Theta(k);
        la[k] = alpha * a.Lambda(k);
    }
    return QSMatrix(a.structure(), std::move(p), std::move(q), std::move(xi), std::move(g),
                    std::move(h), std::move(th), std::move(la));
}

QSMatrix multiply(const QSMatrix& a, const QSMatrix& b) {
    if (a.structure().m != b.structure().m)
        throw DimensionError("product factors need identical block partitions");
    const std::size_t n = a.blocks();
    const auto& sa = a.structure();
    const auto& sb = b.structure();

    BlockStructure s;
    s.m = sa.m;
    s.rl.resize(n + 1);
    s.ru.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        s.rl[j] = sa.rl[j] + sb.rl[j];
        s.ru[j] = sa.ru[j] + sb.ru[j];
    }

    // Forward mixed moments: fwd[j] (sa.rl[j] x sb.ru[j]) accumulates the
    // lower chain of `a` against the upper chain of `b` across boundary j.
    std::vector<DenseMatrix> fwd(n);
    fwd[0] = DenseMatrix(sa.rl[0], sb.ru[0]);
    for (std::size_t j = 0; j + 1 < n; ++j)
        fwd[j + 1] = multiply(a.Q(j), b.G(j)) +
                     multiply(a.Xi(j), multiply(fwd[j], b.Theta(j)));
    // Backward mixed moments: bwd[j] (sa.ru[j+1] x sb.rl[j+1]) across
    // boundary j+1, accumulated from the trailing blocks.
    std::vector<DenseMatrix> bwd(n);
    bwd[n - 1] = DenseMatrix(sa.ru[n], sb.rl[n]);
    for (std::size_t jj = n - 1; jj > 0; --jj) {
        const std::size_t j = jj - 1;
        bwd[j] = multiply(a.H(j + 1), b.P(j + 1)) +
                 multiply(a.Theta(j + 1), multiply(bwd[j + 1], b.Xi(j + 1)));
    }

    std::vector<DenseMatrix> p(n), q(n), xi(n), g(n), h(n), th(n), la(n);
    for (std::size_t k = 0; k < n; ++k) {
        const DenseMatrix eb =
            multiply(a.Lambda(k), b.P(k)) + multiply(a.G(k), multiply(bwd[k], b.Xi(k)));
        const DenseMatrix fa =
            multiply(a.Q(k), b.Lambda(k)) + multiply(a.Xi(k), multiply(fwd[k], b.H(k)));
        const DenseMatrix ebp =
            multiply(a.Lambda(k), b.G(k)) + multiply(a.P(k), multiply(fwd[k], b.Theta(k)));
        const DenseMatrix fap =
            multiply(a.H(k), b.Lambda(k)) + multiply(a.Theta(k), multiply(bwd[k], b.Q(k)));

        p[k] = hstack(a.P(k), eb);
        q[k] = vstack(fa, b.Q(k));
        DenseMatrix xik(s.rl[k + 1], s.rl[k]);
        set_block(xik, 0, 0, a.Xi(k));
        set_block(xik, 0, sa.rl[k], multiply(a.Q(k), b.P(k)));
        set_block(xik, sa.rl[k + 1], sa.rl[k], b.Xi(k));
        xi[k] = std::move(xik);
        g[k] = hstack(a.G(k), ebp);
        h[k] = vstack(fap, b.H(k));
        DenseMatrix thk(s.ru[k], s.ru[k + 1]);
        set_block(thk, 0, 0, a.Theta(k));
        set_block(thk, 0, sa.ru[k + 1], multiply(a.H(k), b.G(k)));
        set_block(thk, sa.ru[k], sa.ru[k + 1], b.Theta(k));
        th[k] = std::move(thk);
        la[k] = multiply(a.Lambda(k), b.Lambda(k)) +
                multiply(a.P(k), multiply(fwd[k], b.H(k))) +
                multiply(a.G(k), multiply(bwd[k], b.Q(k)));
    }
    return QSMatrix(std::move(s), std::move(p), std::move(q), std::move(xi), std::move(g),
                    std::move(h), std::move(th), std::move(la));
}

}  // namespace qss
