#pragma once

#include "qsshift/shift_solver.hpp"

namespace qss {

// Dense brute-force oracles for correctness checks.  Every function here is
// O(total^3) or worse and guarded against benchmark-scale inputs; none of
// them belong in a hot path.

// Dense assembly guard: these oracles refuse matrices larger than this.
inline constexpr std::size_t kAssembleGuard = 500;

// Dense product of the embedded unitary block factors (identity outside each
// block's window).  Unitary by construction.
using AssembledFactor = DenseMatrix;

// V = V~[N-1] * ... * V~[1], each V~[k] acting on the contiguous window of
// size m[k] + rho[k+1] starting at the k-th block offset.
AssembledFactor assemble_v(const SharedFactorization& f);

// Dense T_sigma from its generators: block upper triangular in the (nu, m)
// partition with diagonal blocks LaT[k] + sigma * LaV[k]^H (k >= 1) and
// LaT[0] + sigma * Gam[0], and off-diagonal blocks
// GT[i] * ThT[i+1] ... ThT[j-1] * (HT[j] + sigma * Gam[j]).
DenseMatrix assemble_t(const SharedFactorization& f, cplx sigma);

// U_sigma = U~[0] * ... * U~[N-1], windows as in assemble_v.
AssembledFactor assemble_u(const ShiftFactorization& s);

// Dense R_sigma: block upper triangular in the (m, m) partition with upper
// triangular diagonal blocks LaR[k] and off-diagonal blocks
// GR[i] * ThT[i+1] ... ThT[j-1] * (HT[j] + sigma * Gam[j]).
DenseMatrix assemble_r(const ShiftFactorization& s);

// Dense Sylvester oracle: solves A X + X L = Y through the stacked system
// (I (x) A + L^T (x) I) vec(X) = vec(Y).  A is n x n, L is l x l, Y and X
// are n x l.  Refuses systems with n*l > max_unknowns.
DenseMatrix kronecker_solve(const DenseMatrix& a, const DenseMatrix& l, const DenseMatrix& y,
                            std::size_t max_unknowns = 2000);

// Dense principal square root of a real symmetric positive definite matrix
// via its eigendecomposition.  max_dim must be raised deliberately to run
// beyond test scale.
DenseMatrix dense_sqrt_symmetric(const DenseMatrix& a, std::size_t max_dim = kAssembleGuard);

// Dense principal square root by the coupled Newton (Denman-Beavers)
// iteration X <- (X + Y^{-1})/2, Y <- (Y + X^{-1})/2 from X=A, Y=I; works
// for any matrix with no eigenvalues on the closed negative real axis, in
// particular the nonsymmetric convection-diffusion operators.  Stops when
// the relative step falls below tol (quadratic convergence; typically well
// under 20 iterations).
DenseMatrix dense_sqrt_iterative(const DenseMatrix& a, double tol = 1e-13,
                                 std::size_t max_iter = 50,
                                 std::size_t max_dim = kAssembleGuard);

}  // namespace qss
