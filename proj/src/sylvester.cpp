#include "qsshift/sylvester.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsshift/reference.hpp"

namespace qss {

namespace {

std::vector<std::size_t> block_sizes(const QSMatrix& a) { return a.structure().m; }

BlockVector column_as_blocks(const DenseMatrix& y, std::size_t j,
                             const std::vector<std::size_t>& sizes) {
    std::vector<cplx> col(y.rows());
    for (std::size_t i = 0; i < y.rows(); ++i) col[i] = y(i, j);
    return BlockVector::from_flat(col, sizes);
}

}  // namespace

DenseMatrix solve_lower_triangular(const QSMatrix& a, const DenseMatrix& l,
                                   const DenseMatrix& y) {
    const std::size_t ell = l.rows();
    if (l.cols() != ell) throw DimensionError("coefficient matrix must be square");
    if (y.rows() != a.total() || y.cols() != ell)
        throw DimensionError("right-hand side must be " + std::to_string(a.total()) + " x " +
                             std::to_string(ell));
    double strict_upper = 0.0;
    for (std::size_t i = 0; i < ell; ++i)
        for (std::size_t j = i + 1; j < ell; ++j)
            strict_upper = std::max(strict_upper, std::abs(l(i, j)));
    if (strict_upper > 1e-10 * fro_norm(l))
        throw InvalidArgument("coefficient matrix is not lower triangular");

    const SharedFactorization f = shared_factorize(a);
    const auto sizes = block_sizes(a);
    const std::size_t n = a.total();

    DenseMatrix x(n, ell);
    for (std::size_t ii = ell; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        BlockVector rhs = column_as_blocks(y, i, sizes);
        for (std::size_t j = i + 1; j < ell; ++j) {
            const cplx c = l(j, i);
            if (c == cplx(0.0, 0.0)) continue;
            std::size_t row = 0;
            for (auto& blk : rhs.blocks)
                for (auto& entry : blk) entry -= c * x(row++, j);
        }
        BlockVector xi;
        try {
            xi = solve_shifted(f, l(i, i), rhs);
        } catch (const SingularShift& e) {
            throw SingularShift(i, e.block(),
                                std::string(e.what()) + " (column " + std::to_string(i) + ")");
        }
        std::size_t row = 0;
        for (const auto& blk : xi.blocks)
            for (const cplx& entry : blk) x(row++, i) = entry;
    }
    return x;
}

DenseMatrix solve_diag(const QSMatrix& a, const std::vector<cplx>& d, const DenseMatrix& y) {
    if (y.cols() != d.size())
        throw DimensionError("need one diagonal entry per right-hand column");
    DenseMatrix l(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) l(i, i) = d[i];
    return solve_lower_triangular(a, l, y);
}

DenseMatrix schur_reduce_and_solve(const QSMatrix& a, const DenseMatrix& f,
                                   const DenseMatrix& y, const DenseMatrix& u,
                                   const DenseMatrix& l) {
    const std::size_t ell = f.rows();
    if (f.cols() != ell || u.rows() != ell || u.cols() != ell || l.rows() != ell ||
        l.cols() != ell)
        throw DimensionError("decomposition factors must match the coefficient matrix");
    const DenseMatrix recon = multiply(multiply(u, l), adjoint(u));
    const double fnorm = fro_norm(f);
    if (fro_norm(recon - f) > 1e-10 * (fnorm > 0.0 ? fnorm : 1.0))
        throw InvalidArgument("supplied factors do not reproduce the coefficient matrix");
    const DenseMatrix gram = multiply(adjoint(u), u) - DenseMatrix::identity(ell);
    if (fro_norm(gram) > 1e-10 * std::sqrt(static_cast<double>(ell > 0 ? ell : 1)))
        throw InvalidArgument("supplied basis is not unitary");

    const DenseMatrix xu = solve_lower_triangular(a, l, multiply(y, u));
    return multiply(xu, adjoint(u));
}

PoissonResult poisson_demo(std::size_t na, std::size_t nb, const DenseMatrix& f,
                           std::size_t oracle_cap) {
    if (na < 1 || nb < 1) throw InvalidArgument("poisson_demo needs positive grid sizes");
    DenseMatrix rhs = f;
    if (rhs.rows() == 0 && rhs.cols() == 0) {
        rhs = DenseMatrix(nb, na);
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t i = 0; i < nb; ++i) rhs(i, j) = cplx(1.0, 0.0);
    }
    if (rhs.rows() != nb || rhs.cols() != na)
        throw DimensionError("right-hand side must be nb x na");

    const std::vector<cplx> off(nb > 1 ? nb - 1 : 0, cplx(-1.0, 0.0));
    const std::vector<cplx> diag(nb, cplx(2.0, 0.0));
    const QSMatrix a = from_tridiagonal(off, diag, off);

    // Analytic eigendecomposition of B = tridiag(-1,2,-1) of size na:
    // eigenvalues 2 - 2cos(k pi/(na+1)), orthonormal sine eigenvectors.
    const double pi = std::numbers::pi;
    const double denom = static_cast<double>(na) + 1.0;
    const double amp = std::sqrt(2.0 / denom);
    std::vector<cplx> lambda(na);
    DenseMatrix u(na, na);
    for (std::size_t k = 0; k < na; ++k) {
        const double kk = static_cast<double>(k + 1);
        lambda[k] = cplx(2.0 - 2.0 * std::cos(kk * pi / denom), 0.0);
        for (std::size_t j = 0; j < na; ++j)
            u(j, k) = cplx(amp * std::sin((static_cast<double>(j + 1)) * kk * pi / denom),
                           0.0);
    }

    const DenseMatrix xu = solve_diag(a, lambda, multiply(rhs, u));
    PoissonResult result{multiply(xu, transpose(u)), 0.0, false};

    if (na * nb <= oracle_cap) {
        DenseMatrix b(na, na);
        for (std::size_t i = 0; i < na; ++i) {
            b(i, i) = cplx(2.0, 0.0);
            if (i + 1 < na) {
                b(i, i + 1) = cplx(-1.0, 0.0);
                b(i + 1, i) = cplx(-1.0, 0.0);
            }
        }
        const DenseMatrix oracle = kronecker_solve(to_dense(a), b, rhs, oracle_cap);
        result.relative_error = fro_norm(result.x - oracle) / fro_norm(oracle);
        result.error_available = true;
    }
    return result;
}

}  // namespace qss
