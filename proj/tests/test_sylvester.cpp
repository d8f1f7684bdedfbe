#include <doctest.h>

#include <cmath>
#include <qsshift/reference.hpp>
#include <qsshift/sylvester.hpp>

#include "helpers.hpp"

using qss::cplx;
using qss::DenseMatrix;
using qss::QSMatrix;
using testutil::bitwise_equal;
using testutil::rel_diff;

namespace {

QSMatrix scalar_qs(double v) { return qss::from_tridiagonal({}, {cplx(v)}, {}); }

QSMatrix laplacian_chain(std::size_t n) {
    std::vector<cplx> off(n - 1, -1.0), diag(n, 2.0);
    return qss::from_tridiagonal(off, diag, off);
}

double sylvester_residual(const QSMatrix& a, const DenseMatrix& l, const DenseMatrix& y,
                          const DenseMatrix& x) {
    DenseMatrix ad = qss::to_dense(a);
    DenseMatrix resid = qss::multiply(ad, x) + qss::multiply(x, l) - y;
    return qss::fro_norm(resid) /
           ((qss::fro_norm(ad) + qss::fro_norm(l)) * std::max(qss::fro_norm(x), 1e-300));
}

DenseMatrix diag_matrix(const std::vector<cplx>& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

}  // namespace

TEST_CASE("diagonal coefficient: the scalar case solves by hand") {
    DenseMatrix y(1, 1);
    y(0, 0) = 4.0;
    DenseMatrix x = qss::solve_diag(scalar_qs(2.0), {cplx(2.0)}, y);
    REQUIRE(x.rows() == 1);
    REQUIRE(x.cols() == 1);
    CHECK(std::abs(x(0, 0) - cplx(1.0)) <= 1e-14);
}

TEST_CASE("lower-triangular coefficient: the two-column hand example") {
    QSMatrix a = scalar_qs(1.0);
    DenseMatrix l(2, 2);
    l(0, 0) = 1.0;
    l(1, 0) = 1.0;
    l(1, 1) = 1.0;
    DenseMatrix y(1, 2);
    y(0, 0) = 2.0;
    y(0, 1) = 4.0;
    DenseMatrix x = qss::solve_lower_triangular(a, l, y);
    // Last column first: (1+1) x2 = 4 -> 2; then (1+1) x1 = 2 - 1*2 -> 0.
    CHECK(std::abs(x(0, 0) - cplx(0.0)) <= 1e-14);
    CHECK(std::abs(x(0, 1) - cplx(2.0)) <= 1e-14);
}

TEST_CASE("a diagonal matrix coefficient reproduces solve_diag bitwise") {
    QSMatrix a = qss::random_qs(6, 2, 2, 1, 17);
    std::vector<cplx> d = {cplx(3.0, 1.0), cplx(4.0), cplx(5.0, -2.0)};
    DenseMatrix y = testutil::random_dense(12, 3, 18);
    DenseMatrix via_diag = qss::solve_diag(a, d, y);
    DenseMatrix via_tri = qss::solve_lower_triangular(a, diag_matrix(d), y);
    CHECK(bitwise_equal(via_diag, via_tri));
}

TEST_CASE("diagonal solves satisfy the residual bound on random instances") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        QSMatrix a = qss::random_qs(5 + seed % 3, 2, 2, 2, 40 + seed);
        const std::size_t n = a.structure().total();
        std::vector<cplx> d;
        for (int i = 0; i < 4; ++i) d.push_back(cplx(5.0 + i, 0.5 * i));
        DenseMatrix y = testutil::random_dense(n, d.size(), 50 + seed);
        DenseMatrix x = qss::solve_diag(a, d, y);
        CHECK(sylvester_residual(a, diag_matrix(d), y, x) <= 1e-11);
    }
}

TEST_CASE("triangular solves match the stacked dense oracle") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        QSMatrix a = qss::random_qs(15, 2, 2, 2, 60 + seed);  // 30 x 30
        const std::size_t n = a.structure().total();
        const std::size_t ell = 5;
        DenseMatrix l = testutil::random_dense(ell, ell, 70 + seed);
        for (std::size_t j = 0; j < ell; ++j) {
            for (std::size_t i = 0; i < j; ++i) l(i, j) = 0.0;  // lower triangular
            l(j, j) += cplx(6.0, 0.0);
        }
        DenseMatrix y = testutil::random_dense(n, ell, 80 + seed);
        DenseMatrix x = qss::solve_lower_triangular(a, l, y);
        DenseMatrix x_ref = qss::kronecker_solve(qss::to_dense(a), l, y);
        CHECK(rel_diff(x, x_ref) <= 1e-9);
        CHECK(sylvester_residual(a, l, y, x) <= 1e-11);
    }
}

TEST_CASE("coefficients with an upper triangle are rejected") {
    QSMatrix a = scalar_qs(1.0);
    DenseMatrix l(2, 2);
    l(0, 0) = 1.0;
    l(1, 1) = 1.0;
    l(0, 1) = 0.5;
    DenseMatrix y(1, 2);
    y(0, 0) = 1.0;
    y(0, 1) = 1.0;
    CHECK_THROWS_AS((void)qss::solve_lower_triangular(a, l, y), qss::InvalidArgument);
}

TEST_CASE("dimension mismatches are rejected") {
    QSMatrix a = laplacian_chain(3);
    DenseMatrix l = DenseMatrix::identity(2);
    DenseMatrix y(4, 2);  // wrong row count
    CHECK_THROWS_AS((void)qss::solve_lower_triangular(a, l, y), qss::DimensionError);
    DenseMatrix y2(3, 3);  // wrong column count
    CHECK_THROWS_AS((void)qss::solve_lower_triangular(a, l, y2), qss::DimensionError);
}

TEST_CASE("a diagonal entry hitting an eigenvalue reports the failing column") {
    QSMatrix a = scalar_qs(1.0);
    DenseMatrix y(1, 2);
    y(0, 0) = 1.0;
    y(0, 1) = 1.0;
    try {
        (void)qss::solve_diag(a, {cplx(2.0), cplx(-1.0)}, y);
        CHECK(false);
    } catch (const qss::SingularShift& e) {
        CHECK(e.shift_index() == 1);
    }
}

TEST_CASE("one shared factorization per matrix-equation solve") {
    QSMatrix a = qss::random_qs(5, 1, 1, 1, 90);
    const std::size_t n = a.structure().total();
    DenseMatrix y = testutil::random_dense(n, 3, 91);
    std::vector<cplx> d = {cplx(4.0), cplx(5.0), cplx(6.0)};

    std::uint64_t before = qss::shared_factorize_count();
    (void)qss::solve_diag(a, d, y);
    CHECK(qss::shared_factorize_count() == before + 1);

    before = qss::shared_factorize_count();
    (void)qss::solve_lower_triangular(a, diag_matrix(d), y);
    CHECK(qss::shared_factorize_count() == before + 1);

    before = qss::shared_factorize_count();
    (void)qss::schur_reduce_and_solve(a, diag_matrix(d), y, DenseMatrix::identity(3),
                                      diag_matrix(d));
    CHECK(qss::shared_factorize_count() == before + 1);
}

TEST_CASE("schur_reduce_and_solve with a trivial pair equals the direct solver") {
    QSMatrix a = qss::random_qs(4, 2, 1, 1, 95);
    const std::size_t n = a.structure().total();
    const std::size_t ell = 3;
    DenseMatrix l = testutil::random_dense(ell, ell, 96);
    for (std::size_t j = 0; j < ell; ++j) {
        for (std::size_t i = 0; i < j; ++i) l(i, j) = 0.0;
        l(j, j) += cplx(5.0, 0.0);
    }
    DenseMatrix y = testutil::random_dense(n, ell, 97);
    DenseMatrix direct = qss::solve_lower_triangular(a, l, y);
    DenseMatrix via_schur = qss::schur_reduce_and_solve(a, l, y, DenseMatrix::identity(ell), l);
    CHECK(rel_diff(via_schur, direct) <= 1e-13);
}

TEST_CASE("schur_reduce_and_solve handles a symmetric coefficient") {
    QSMatrix a = qss::random_qs(6, 2, 2, 1, 98);
    const std::size_t n = a.structure().total();
    const std::size_t ell = 4;
    DenseMatrix b = testutil::random_dense(ell, ell, 99, /*complex_entries=*/false);
    DenseMatrix f = b + qss::transpose(b);
    for (std::size_t i = 0; i < ell; ++i) f(i, i) += cplx(8.0, 0.0);
    qss::SymEig e = qss::symmetric_eig(f);
    DenseMatrix lam(ell, ell);
    for (std::size_t i = 0; i < ell; ++i) lam(i, i) = e.values[i];
    DenseMatrix y = testutil::random_dense(n, ell, 100);
    DenseMatrix x = qss::schur_reduce_and_solve(a, f, y, e.vectors, lam);
    CHECK(sylvester_residual(a, f, y, x) <= 1e-9);
    // Cross-check against the dense stacked system.
    DenseMatrix x_ref = qss::kronecker_solve(qss::to_dense(a), f, y);
    CHECK(rel_diff(x, x_ref) <= 1e-9);
}

TEST_CASE("schur_reduce_and_solve validates the supplied pair") {
    QSMatrix a = scalar_qs(1.0);
    DenseMatrix f = DenseMatrix::identity(2);
    DenseMatrix u = DenseMatrix::identity(2);
    DenseMatrix y(1, 2);
    y(0, 0) = 1.0;
    y(0, 1) = 1.0;
    DenseMatrix wrong_l = DenseMatrix::identity(2);
    wrong_l(1, 1) = 2.0;  // U wrong_l U^H != F
    CHECK_THROWS_AS((void)qss::schur_reduce_and_solve(a, f, y, u, wrong_l),
                    qss::InvalidArgument);
    DenseMatrix not_unitary = DenseMatrix::identity(2);
    not_unitary(0, 0) = 2.0;
    CHECK_THROWS_AS((void)qss::schur_reduce_and_solve(a, f, y, not_unitary,
                                                      DenseMatrix::identity(2)),
                    qss::InvalidArgument);
}

TEST_CASE("poisson demo: the 1x1 case is a quarter") {
    qss::PoissonResult r = qss::poisson_demo(1, 1);
    REQUIRE(r.x.rows() == 1);
    REQUIRE(r.x.cols() == 1);
    CHECK(std::abs(r.x(0, 0) - cplx(0.25)) <= 1e-14);
    CHECK(r.error_available);
    CHECK(r.relative_error <= 1e-14);
}

TEST_CASE("poisson demo: analytic eigenpairs of the second coefficient") {
    // The demo's correctness rests on the sine eigenbasis; check it directly.
    const std::size_t na = 40;
    const double pi = 3.14159265358979323846;
    DenseMatrix b(na, na);
    for (std::size_t i = 0; i < na; ++i) {
        b(i, i) = 2.0;
        if (i + 1 < na) {
            b(i, i + 1) = -1.0;
            b(i + 1, i) = -1.0;
        }
    }
    for (std::size_t k = 0; k < na; ++k) {
        const double lam = 2.0 - 2.0 * std::cos((k + 1) * pi / (na + 1));
        std::vector<cplx> v(na);
        for (std::size_t j = 0; j < na; ++j)
            v[j] = std::sqrt(2.0 / (na + 1)) * std::sin((j + 1) * (k + 1) * pi / (na + 1));
        std::vector<cplx> bv = qss::mat_vec(b, v);
        double defect = 0.0;
        for (std::size_t j = 0; j < na; ++j) defect += std::norm(bv[j] - lam * v[j]);
        CHECK(std::sqrt(defect) <= 1e-12);
    }
}

TEST_CASE("poisson demo matches the stacked oracle at moderate sizes") {
    qss::PoissonResult r = qss::poisson_demo(10, 50);
    CHECK(r.error_available);
    CHECK(r.relative_error <= 1e-12);
    REQUIRE(r.x.rows() == 50);
    REQUIRE(r.x.cols() == 10);

    // A custom right-hand side takes the same path.
    DenseMatrix f = testutil::random_dense(8, 6, 3, /*complex_entries=*/false);
    qss::PoissonResult rc = qss::poisson_demo(6, 8, f);
    CHECK(rc.error_available);
    CHECK(rc.relative_error <= 1e-12);
}

TEST_CASE("poisson demo reports when the oracle is out of reach") {
    qss::PoissonResult r = qss::poisson_demo(4, 4, {}, /*oracle_cap=*/8);
    CHECK(!r.error_available);
    REQUIRE(r.x.rows() == 4);
    // The solution itself is still produced; verify its residual directly.
    DenseMatrix b(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        b(i, i) = 2.0;
        if (i + 1 < 4) {
            b(i, i + 1) = -1.0;
            b(i + 1, i) = -1.0;
        }
    }
    DenseMatrix ones(4, 4);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 4; ++i) ones(i, j) = 1.0;
    DenseMatrix ad = qss::to_dense(laplacian_chain(4));
    DenseMatrix resid = qss::multiply(ad, r.x) + qss::multiply(r.x, b) - ones;
    CHECK(qss::fro_norm(resid) <= 1e-12 * qss::fro_norm(ones) * 16.0);
}
