#pragma once

#include "qsshift/shift_solver.hpp"

namespace qss {

// Solvers for A X + X L = Y where A is quasiseparable (n x n), L is a small
// dense l x l coefficient (diagonal or lower triangular), Y is dense n x l.
// Every entry point builds exactly one shared factorization of A and runs
// all column solves against it.

// L = diag(d): column i solves (A + d_i I) x_i = y_i.
// Bitwise identical to solve_lower_triangular with the corresponding
// diagonal matrix.
DenseMatrix solve_diag(const QSMatrix& a, const std::vector<cplx>& d, const DenseMatrix& y);

// L lower triangular: backward column substitution
//   (A + L(i,i) I) x_i = y_i - sum_{j>i} L(j,i) x_j,   i = l-1 .. 0,
// reading the couplings down column i of L.  Exact zero couplings are
// skipped (no arithmetic).  The strict upper triangle of L must vanish to
// within 1e-10 * ||L||_F.
DenseMatrix solve_lower_triangular(const QSMatrix& a, const DenseMatrix& l,
                                   const DenseMatrix& y);

// General dense F with a caller-supplied decomposition F = U L U^H
// (U unitary, L lower triangular): solves A X + X F = Y as
// X = solve_lower_triangular(A, L, Y U) U^H.  The pair is validated to
// 1e-10 relative before use.
DenseMatrix schur_reduce_and_solve(const QSMatrix& a, const DenseMatrix& f,
                                   const DenseMatrix& y, const DenseMatrix& u,
                                   const DenseMatrix& l);

struct PoissonResult {
    DenseMatrix x;              // nb x na solution
    double relative_error;      // vs the dense stacked-system oracle
    bool error_available;       // false when na*nb exceeded oracle_cap
};

// Discrete Poisson demo: A X + X B = F with A = tridiag(-1,2,-1) of size nb,
// B of size na, F defaulting to all ones (pass an empty matrix).  B is
// diagonalized analytically (eigenvalues 2 - 2cos(k pi/(na+1)), sine
// eigenvectors), the columns are solved through one factorization of A, and
// the result is compared against kronecker_solve whenever na*nb <= oracle_cap.
PoissonResult poisson_demo(std::size_t na, std::size_t nb, const DenseMatrix& f = {},
                           std::size_t oracle_cap = 50 * 200);

}  // namespace qss
