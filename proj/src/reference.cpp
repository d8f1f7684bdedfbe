#include "qsshift/reference.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace qss {

namespace {

void check_guard(std::size_t total, const char* who) {
    if (total > kAssembleGuard)
        throw GuardExceeded(std::string(who) + ": dense assembly limited to " +
                            std::to_string(kAssembleGuard) + " rows, got " +
                            std::to_string(total));
}

// B := B * W where W is the identity except for `window` (square) embedded
// with its (0,0) entry at (eta, eta).
void multiply_embedded_right(DenseMatrix& b, const DenseMatrix& window, std::size_t eta) {
    const std::size_t sz = window.rows();
    if (sz == 0) return;
    const DenseMatrix cols = slice(b, 0, b.rows(), eta, sz);
    set_block(b, 0, eta, multiply(cols, window));
}

// Accumulates GT/GR-style off-diagonal blocks:
//   lead * ThT[i+1] ... ThT[j-1] * (HT[j] + sigma*Gam[j])
DenseMatrix coupled_block(const SharedFactorization& f, const DenseMatrix& lead, cplx sigma,
                          std::size_t i, std::size_t j) {
    DenseMatrix acc = lead;
    for (std::size_t k = i + 1; k < j; ++k) acc = multiply(acc, f.ThT[k]);
    return multiply(acc, f.HT[j] + sigma * f.Gam[j]);
}

}  // namespace

AssembledFactor assemble_v(const SharedFactorization& f) {
    const std::size_t total = f.structure.total();
    check_guard(total, "assemble_v");
    const std::size_t n = f.structure.blocks();
    const auto off = f.structure.offsets();

    DenseMatrix v = DenseMatrix::identity(total);
    for (std::size_t kk = n; kk > 0; --kk) {
        const std::size_t k = kk - 1;
        multiply_embedded_right(v, f.V[k].q(), off[k]);
    }
    return v;
}

DenseMatrix assemble_t(const SharedFactorization& f, cplx sigma) {
    const std::size_t total = f.structure.total();
    check_guard(total, "assemble_t");
    const std::size_t n = f.structure.blocks();
    const auto coff = f.structure.offsets();
    std::vector<std::size_t> roff(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) roff[k + 1] = roff[k] + f.nu[k];

    DenseMatrix t(total, total);
    for (std::size_t k = 0; k < n; ++k) {
        const DenseMatrix diag =
            (k == 0) ? f.LaT[0] + sigma * f.Gam[0] : f.LaT[k] + sigma * adjoint(f.LaV[k]);
        set_block(t, roff[k], coff[k], diag);
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            set_block(t, roff[i], coff[j], coupled_block(f, f.GT[i], sigma, i, j));
    return t;
}

AssembledFactor assemble_u(const ShiftFactorization& s) {
    const SharedFactorization& f = *s.owner;
    const std::size_t total = f.structure.total();
    check_guard(total, "assemble_u");
    const std::size_t n = f.structure.blocks();
    const auto off = f.structure.offsets();

    DenseMatrix u = DenseMatrix::identity(total);
    for (std::size_t k = 0; k < n; ++k) multiply_embedded_right(u, s.U[k].q(), off[k]);
    return u;
}

DenseMatrix assemble_r(const ShiftFactorization& s) {
    const SharedFactorization& f = *s.owner;
    const std::size_t total = f.structure.total();
    check_guard(total, "assemble_r");
    const std::size_t n = f.structure.blocks();
    const auto off = f.structure.offsets();

    DenseMatrix r(total, total);
    for (std::size_t k = 0; k < n; ++k) set_block(r, off[k], off[k], s.LaR[k]);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            set_block(r, off[i], off[j], coupled_block(f, s.GR[i], s.sigma, i, j));
    return r;
}

DenseMatrix dense_sqrt_symmetric(const DenseMatrix& a, std::size_t max_dim) {
    if (a.rows() > max_dim)
        throw GuardExceeded("dense_sqrt_symmetric limited to " + std::to_string(max_dim) +
                            " rows, got " + std::to_string(a.rows()));
    const SymEig eig = symmetric_eig(a);
    const std::size_t n = a.rows();
    for (double lam : eig.values)
        if (!(lam > 0.0))
            throw InvalidArgument("dense_sqrt_symmetric needs a positive definite matrix");
    DenseMatrix scaled_vecs = eig.vectors;
    for (std::size_t j = 0; j < n; ++j) {
        const double root = std::sqrt(eig.values[j]);
        for (std::size_t i = 0; i < n; ++i) scaled_vecs(i, j) *= root;
    }
    return multiply(scaled_vecs, adjoint(eig.vectors));
}

DenseMatrix dense_sqrt_iterative(const DenseMatrix& a, double tol, std::size_t max_iter,
                                 std::size_t max_dim) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("dense_sqrt_iterative needs a square matrix");
    if (n > max_dim)
        throw GuardExceeded("dense_sqrt_iterative limited to " + std::to_string(max_dim) +
                            " rows, got " + std::to_string(n));
    const DenseMatrix id = DenseMatrix::identity(n);
    DenseMatrix x = a;
    DenseMatrix y = id;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const DenseMatrix yinv = dense_solve(y, id);
        const DenseMatrix xinv = dense_solve(x, id);
        DenseMatrix xn = cplx(0.5, 0.0) * (x + yinv);
        DenseMatrix yn = cplx(0.5, 0.0) * (y + xinv);
        const double step = fro_norm(xn - x);
        x = std::move(xn);
        y = std::move(yn);
        if (step <= tol * fro_norm(x)) return x;
    }
    return x;
}

DenseMatrix kronecker_solve(const DenseMatrix& a, const DenseMatrix& l, const DenseMatrix& y,
                            std::size_t max_unknowns) {
    const std::size_t n = a.rows();
    const std::size_t ell = l.rows();
    if (a.cols() != n || l.cols() != ell)
        throw DimensionError("kronecker_solve needs square coefficient matrices");
    if (y.rows() != n || y.cols() != ell)
        throw DimensionError("kronecker_solve right-hand side must be n x l");
    if (n * ell > max_unknowns)
        throw GuardExceeded("kronecker_solve limited to " + std::to_string(max_unknowns) +
                            " unknowns, got " + std::to_string(n * ell));

    // Column-stacked system: (I (x) A + L^T (x) I) vec(X) = vec(Y).
    const std::size_t nn = n * ell;
    DenseMatrix sys(nn, nn);
    for (std::size_t jb = 0; jb < ell; ++jb) {
        for (std::size_t jc = 0; jc < n; ++jc)
            for (std::size_t jr = 0; jr < n; ++jr)
                sys(jb * n + jr, jb * n + jc) = a(jr, jc);
        for (std::size_t ib = 0; ib < ell; ++ib) {
            const cplx lt = l(jb, ib);  // (L^T)(ib, jb)
            if (lt == cplx(0.0, 0.0)) continue;
            for (std::size_t d = 0; d < n; ++d) sys(ib * n + d, jb * n + d) += lt;
        }
    }
    std::vector<cplx> rhs(nn);
    for (std::size_t j = 0; j < ell; ++j)
        for (std::size_t i = 0; i < n; ++i) rhs[j * n + i] = y(i, j);
    const std::vector<cplx> sol = dense_solve(sys, rhs);
    DenseMatrix x(n, ell);
    for (std::size_t j = 0; j < ell; ++j)
        for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[j * n + i];
    return x;
}

}  // namespace qss
