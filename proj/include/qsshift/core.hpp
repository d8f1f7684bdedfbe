#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qsshift/kernels.hpp"

namespace qss {

// Block partition of a square matrix together with the per-boundary ranks of
// its strictly lower and strictly upper parts.  With N diagonal blocks the
// rank arrays have N+1 entries indexed by the boundaries between consecutive
// blocks; the outermost boundaries always carry rank 0.
struct BlockStructure {
    std::vector<std::size_t> m;   // N block sizes
    std::vector<std::size_t> rl;  // N+1 lower ranks, rl[0] = rl[N] = 0
    std::vector<std::size_t> ru;  // N+1 upper ranks, ru[0] = ru[N] = 0

    std::size_t blocks() const { return m.size(); }
    std::size_t total() const;
    std::vector<std::size_t> offsets() const;  // N+1 prefix sums of m

    bool operator==(const BlockStructure&) const = default;
};

// Quasiseparable representation.  Block (i,j) of the matrix equals
//   P(i) * Xi(i-1) * ... * Xi(j+1) * Q(j)   below the diagonal,
//   G(i) * Theta(i+1) * ... * Theta(j-1) * H(j)   above it,
//   Lambda(i) on it,
// with all generator arrays stored 0-based per block k:
//   P(k): m[k] x rl[k]      Q(k): rl[k+1] x m[k]    Xi(k): rl[k+1] x rl[k]
//   G(k): m[k] x ru[k+1]    H(k): ru[k] x m[k]      Theta(k): ru[k] x ru[k+1]
//   Lambda(k): m[k] x m[k]
// Out-of-range generators are the conforming empty matrices, so every code
// path is uniform in the block index.  Immutable after construction.
class QSMatrix {
public:
    QSMatrix(BlockStructure s, std::vector<DenseMatrix> p, std::vector<DenseMatrix> q,
             std::vector<DenseMatrix> xi, std::vector<DenseMatrix> g,
             std::vector<DenseMatrix> h, std::vector<DenseMatrix> theta,
             std::vector<DenseMatrix> lambda);

    const BlockStructure& structure() const { return s_; }
    std::size_t blocks() const { return s_.blocks(); }
    std::size_t total() const { return s_.total(); }

    const DenseMatrix& P(std::size_t k) const { return p_[k]; }
    const DenseMatrix& Q(std::size_t k) const { return q_[k]; }
    const DenseMatrix& Xi(std::size_t k) const { return xi_[k]; }
    const DenseMatrix& G(std::size_t k) const { return g_[k]; }
    const DenseMatrix& H(std::size_t k) const { return h_[k]; }
    const DenseMatrix& Theta(std::size_t k) const { return th_[k]; }
    const DenseMatrix& Lambda(std::size_t k) const { return la_[k]; }

private:
    BlockStructure s_;
    std::vector<DenseMatrix> p_, q_, xi_, g_, h_, th_, la_;
};

// Vector partitioned conformably with a QSMatrix block structure.
struct BlockVector {
    std::vector<std::vector<cplx>> blocks;

    std::size_t total() const;
    std::vector<cplx> flatten() const;
    static BlockVector from_flat(const std::vector<cplx>& x,
                                 const std::vector<std::size_t>& sizes);
};

double norm2(const BlockVector& x);
// y += alpha * x (conforming partitions).
void axpy_inplace(BlockVector& y, cplx alpha, const BlockVector& x);
BlockVector scaled(cplx alpha, const BlockVector& x);

// ---- builders -----------------------------------------------------------------

// Tridiagonal matrix as an order-(1,1) representation with scalar blocks.
QSMatrix from_tridiagonal(const std::vector<cplx>& sub, const std::vector<cplx>& diag,
                          const std::vector<cplx>& sup);

// Five-point convection-diffusion stencil on an n x n grid, unscaled:
// N = n blocks of size n, diagonal blocks tridiag(-1, 4, -1), sub-diagonal
// coupling -(1+ch) I and super-diagonal coupling -(1-ch) I with
// ch = c * h / 2, h = 1 / (n+1).  Convection acts along the block index.
QSMatrix convection_diffusion_2d(std::size_t n, double c);

// Uniform random representation: N blocks of size m, interior lower/upper
// ranks r_lower/r_upper, generator entries drawn uniformly from [-1, 1]
// (real; imaginary parts zero).  Pure function of its arguments: the draw
// order and the engine-output mapping are fixed.
QSMatrix random_qs(std::size_t n_blocks, std::size_t m, std::size_t r_lower,
                   std::size_t r_upper, std::uint64_t seed);

// Deterministic uniform generator with a platform-independent mapping from
// the mt19937_64 output stream to [0,1).
class UniformRng {
public:
    explicit UniformRng(std::uint64_t seed) : eng_(seed) {}
    // [0, 1)
    double next_unit() {
        return static_cast<double>(eng_() >> 11) * 0x1p-53;
    }
    // [-1, 1)
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::mt19937_64 eng_;
};

// ---- operations ----------------------------------------------------------------

DenseMatrix to_dense(const QSMatrix& a);

// y = A x in O(total * (r^2 + m)) via one forward and one backward recursion
// over the generators; the dense matrix is never materialized.
BlockVector matvec(const QSMatrix& a, const BlockVector& x);

// (g, A g, ..., A^p g) by repeated matvec.
std::vector<BlockVector> gemv_powers(const QSMatrix& a, const BlockVector& g, std::size_t p);

// alpha * A at generator level (orders unchanged).
QSMatrix scale(const QSMatrix& a, cplx alpha);

// A * B at generator level; orders add.
QSMatrix multiply(const QSMatrix& a, const QSMatrix& b);

}  // namespace qss
