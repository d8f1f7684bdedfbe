#pragma once

#include <cstdint>
#include <vector>

#include "qsshift/core.hpp"

namespace qss {

// Shift-independent part of the factorization A + sigma*I = V * T_sigma.
// V is a product of per-block unitary factors; T_sigma is block upper
// triangular in the (nu, m) partition and its generators depend on sigma
// only through the cached auxiliaries below.  Immutable after construction
// and safe for concurrent reads.
//
// Index conventions, with N blocks (0-based k) and boundary-indexed rank
// arrays (0..N):
//   rho[N] = 0,  rho[k] = min(m[k] + rho[k+1], rl[k]),  rho[0] = 0
//   nu[k] = m[k] + rho[k+1] - rho[k]           (>= 0; zero is legal)
//   rho_prime[j] = rho[j] + ru[j]
// V[k] (k >= 1) is the full QR factor of [P(k); X(k+1) Xi(k)], of size
// (m[k] + rho[k+1]); V[0] is the trivial factorization whose q() is the
// identity of size nu[0].  Objects indexed by rho_prime dimensions order the
// upper-rank rows/columns first, then the rho rows/columns.
struct SharedFactorization {
    BlockStructure structure;
    std::vector<std::size_t> rho;        // N+1
    std::vector<std::size_t> nu;         // N
    std::vector<std::size_t> rho_prime;  // N+1

    std::vector<QRFactors> V;  // N entries; V[0] trivial

    // Partitions of V[k] (k >= 1): [[PV, LaV], [XiV, QV]] with the row split
    // at m[k] and the column split at rho[k].
    std::vector<DenseMatrix> PV, LaV, XiV, QV;

    // Shift-independent generators of T_sigma.  HT[k] (k>=1) is
    // rho_prime[k] x m[k]; ThT[k] (1<=k<=N-2) is rho_prime[k] x rho_prime[k+1];
    // LaT[k] is nu[k] x m[k]; GT[k] (k<=N-2) is nu[k] x rho_prime[k+1];
    // Gam[k] is the shift coupling (rho_prime[k] x m[k] for k>=1, and
    // [I; 0] of size nu[0] x m[0] at k=0).
    std::vector<DenseMatrix> HT, ThT, LaT, GT, Gam;

    // Compression rows X[k] = rho[k] x rl[k] (k = 1..N-1), retained for
    // diagnostics and tests only.
    std::vector<DenseMatrix> X;
};

// Per-shift part: T_sigma = U_sigma * R_sigma with R_sigma block upper
// triangular carrying square upper-triangular diagonal blocks.
struct ShiftFactorization {
    const SharedFactorization* owner = nullptr;
    cplx sigma{};

    std::vector<QRFactors> U;      // N
    std::vector<DenseMatrix> LaR;  // N; m[k] x m[k] upper triangular
    std::vector<DenseMatrix> GR;   // N; GR[k] (k <= N-2) is m[k] x rho_prime[k+1]
    std::vector<DenseMatrix> HTs;  // N; HT[k] + sigma*Gam[k] (k >= 1), cached for step 4
};

// Builds the shift-independent factorization in O(N (m+r)^3).  Never reads
// any shift.
SharedFactorization shared_factorize(const QSMatrix& a);

// Number of shared_factorize calls made by this process so far
// (instrumentation for the one-factorization-per-solve guarantees).
std::uint64_t shared_factorize_count();

// w = V^H y in one backward sweep; w is partitioned by nu.
BlockVector apply_v_adjoint(const SharedFactorization& f, const BlockVector& y);

// Per-shift forward sweep producing U, LaR, GR.  Always completes; a
// singular shifted matrix only surfaces later, from backsubstitute.
ShiftFactorization shift_factorize(const SharedFactorization& f, cplx sigma);

// v = U_sigma^H w in one forward sweep; v is partitioned by m.
BlockVector apply_u_adjoint(const ShiftFactorization& s, const BlockVector& w);

// Solves R_sigma x = v by the backward generator recursion.  Throws
// SingularShift when a diagonal block is tolerance-singular.
BlockVector backsubstitute(const ShiftFactorization& s, const BlockVector& v);

// One complete solve (A + sigma*I) x = y against a prebuilt factorization.
BlockVector solve_shifted(const SharedFactorization& f, cplx sigma, const BlockVector& y);

// Many shifts against one shared factorization.  shifts and rhs must have
// equal length; rhs entries are independent.  Per-shift solves may run on a
// small thread pool (see QSSHIFT_WORKERS); results are identical for any
// worker count.  SingularShift errors carry the offending shift index.
std::vector<BlockVector> solve_many(const QSMatrix& a, const std::vector<cplx>& shifts,
                                    const std::vector<BlockVector>& rhs);
// Same, reusing a caller-owned factorization (the entry point for series
// evaluations and matrix-equation sweeps that own their factorization).
std::vector<BlockVector> solve_many(const SharedFactorization& f,
                                    const std::vector<cplx>& shifts,
                                    const std::vector<BlockVector>& rhs);

// Reference baseline: refactorizes from scratch for every shift.  Used for
// correctness cross-checks and the factorization-reuse timing experiment.
std::vector<BlockVector> solve_sequential_baseline(const QSMatrix& a,
                                                   const std::vector<cplx>& shifts,
                                                   const std::vector<BlockVector>& rhs);

namespace detail {
// Overrides the solve_many worker count (0 = derive from QSSHIFT_WORKERS or
// hardware).  Benchmarks pin this to 1 for fair timing ratios.
void set_solver_workers(unsigned n);
unsigned solver_workers();
}  // namespace detail

}  // namespace qss
