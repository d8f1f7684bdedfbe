#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qsshift/errors.hpp"

namespace qss {

using cplx = std::complex<double>;

// Dense complex matrix with column-major storage.  Zero-dimensional shapes
// (p x 0, 0 x q) are first-class citizens: products through a zero inner
// dimension yield zero matrices of the conforming shape.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return a_.size(); }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i + j * rows_]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i + j * rows_]; }

    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

// ---- elementwise / structural helpers -------------------------------------

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(cplx alpha, const DenseMatrix& a);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix adjoint(const DenseMatrix& a);    // conjugate transpose
DenseMatrix transpose(const DenseMatrix& a);  // plain transpose

// Copy of the rectangle [r0, r0+nrows) x [c0, c0+ncols).
DenseMatrix slice(const DenseMatrix& a, std::size_t r0, std::size_t nrows,
                  std::size_t c0, std::size_t ncols);
// Writes `b` into `a` with its (0,0) entry at (r0, c0).
void set_block(DenseMatrix& a, std::size_t r0, std::size_t c0, const DenseMatrix& b);
DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom);
DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right);

double fro_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

// ---- vector helpers --------------------------------------------------------

std::vector<cplx> mat_vec(const DenseMatrix& a, const std::vector<cplx>& x);
double norm2(const std::vector<cplx>& x);
DenseMatrix column_matrix(const std::vector<cplx>& x);
std::vector<cplx> to_vector(const DenseMatrix& column);

// ---- QR factorization ------------------------------------------------------

// Householder QR of a p x q matrix M = q() * r() where q() is p x p unitary
// and r() is p x q upper triangular with a real, nonnegative diagonal.  The
// factorization is stored in reflector form; q() materializes the unitary
// factor on demand in O(p^2 * min(p,q)), while apply_adjoint applies q()^H
// to a vector in O(p * min(p,q)) without materializing anything.
// Identical inputs produce bit-identical factors.
class QRFactors {
public:
    explicit QRFactors(const DenseMatrix& m);

    std::size_t p() const { return p_; }         // row count of the input
    std::size_t rcols() const { return cols_; }  // column count of the input
    std::size_t reflectors() const { return k_; }

    const DenseMatrix& r() const { return r_; }
    DenseMatrix q() const;

    // X := q()^H * X for a p x n matrix (or length-p vector).
    void apply_adjoint_inplace(DenseMatrix& x) const;
    DenseMatrix apply_adjoint(const DenseMatrix& x) const;
    std::vector<cplx> apply_adjoint(const std::vector<cplx>& x) const;

private:
    std::size_t p_ = 0;
    std::size_t cols_ = 0;
    std::size_t k_ = 0;       // number of reflectors = min(p, cols)
    DenseMatrix af_;          // reflectors below the diagonal, raw R above
    std::vector<cplx> tau_;   // reflector scales
    std::vector<cplx> d_;     // unimodular row scales making diag(r) real >= 0
    DenseMatrix r_;
};

QRFactors qr(const DenseMatrix& m);
std::vector<cplx> apply_adjoint(const QRFactors& f, const std::vector<cplx>& x);

// ---- triangular solve -------------------------------------------------------

// Relative singularity tolerance for triangular pivots: a diagonal entry
// counts as singular when its magnitude is <= 1e3 * unit-roundoff times the
// largest diagonal magnitude.
double upper_singularity_threshold(const DenseMatrix& r);

// Back substitution with the square upper-triangular matrix r.  Throws
// SingularDiagonal on a tolerance-singular pivot.
std::vector<cplx> solve_upper(const DenseMatrix& r, const std::vector<cplx>& b);
DenseMatrix solve_upper(const DenseMatrix& r, const DenseMatrix& b);

// ---- symmetric eigendecomposition -------------------------------------------

struct SymEig {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // orthogonal, real (stored complex), columns match values
};

// Cyclic Jacobi eigendecomposition of a real symmetric matrix.  Input is
// complex storage; imaginary parts and asymmetry beyond 1e-12 * ||M||_F are
// rejected with InvalidArgument.  Oracle-grade accuracy, O(n^3) per sweep.
SymEig symmetric_eig(const DenseMatrix& m);

// ---- dense linear solve ------------------------------------------------------

// LU solve with partial pivoting (oracle path).  A real-valued system (all
// imaginary parts exactly zero) is dispatched to real arithmetic.  Throws
// SingularDiagonal on an exactly singular pivot.
std::vector<cplx> dense_solve(const DenseMatrix& m, const std::vector<cplx>& b);
DenseMatrix dense_solve(const DenseMatrix& m, const DenseMatrix& b);

}  // namespace qss
