#include <doctest.h>

#include <cmath>
#include <numbers>
#include <qsshift/matfun.hpp>
#include <qsshift/reference.hpp>

#include "helpers.hpp"

using qss::BlockVector;
using qss::cplx;
using qss::QSMatrix;
using testutil::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

QSMatrix scalar_qs(double v) { return qss::from_tridiagonal({}, {cplx(v)}, {}); }

QSMatrix laplacian_chain(std::size_t n) {
    std::vector<cplx> off(n - 1, -1.0), diag(n, 2.0);
    return qss::from_tridiagonal(off, diag, off);
}

BlockVector scalar_vec(double v) { return BlockVector::from_flat({cplx(v)}, {1}); }

// Scalar evaluation of a rational approximation at x.
double eval_rational(const qss::RationalApproximation& ra, double x) {
    cplx acc = 0.0;
    for (const auto& term : ra.terms) acc += term.kappa * x / (term.omega * term.omega - x);
    return acc.real();
}

double scalar_sweep_error(const qss::RationalApproximation& ra, double lo, double hi) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = lo + (hi - lo) * i / 999.0;
        const double err = std::abs(eval_rational(ra, x) - std::sqrt(x)) / std::sqrt(x);
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace

TEST_CASE("complete elliptic integral matches frozen references") {
    CHECK(std::abs(qss::elliptic_K(0.0) - kPi / 2.0) <= 1e-15);
    CHECK(std::abs(qss::elliptic_K(0.5) - 1.6857503548125961) <= 1e-14);
    CHECK(std::abs(qss::elliptic_K(0.6455) - 1.7892606358203498) <= 1e-14);
    CHECK(qss::elliptic_K(0.9) > qss::elliptic_K(0.1));  // monotone in the modulus
    CHECK_THROWS_AS((void)qss::elliptic_K(1.0), qss::InvalidArgument);
    CHECK_THROWS_AS((void)qss::elliptic_K(-0.1), qss::InvalidArgument);
}

TEST_CASE("real Jacobi elliptic functions satisfy the fundamental identities") {
    for (double k : {0.0, 0.3, 0.7, 0.95}) {
        for (double u : {-2.0, -0.6, 0.0, 0.4, 1.1, 3.0}) {
            auto [sn, cn, dn] = qss::jacobi_elliptic(u, k);
            CHECK(std::abs(sn * sn + cn * cn - 1.0) <= 1e-13);
            CHECK(std::abs(dn * dn + k * k * sn * sn - 1.0) <= 1e-13);
        }
    }
    auto at0 = qss::jacobi_elliptic(0.0, 0.4);
    CHECK(std::abs(at0.sn) <= 1e-15);
    CHECK(std::abs(at0.cn - 1.0) <= 1e-15);
    CHECK(std::abs(at0.dn - 1.0) <= 1e-15);
    // sn(K, k) = 1 at the quarter period.
    const double k = 0.55;
    auto atK = qss::jacobi_elliptic(qss::elliptic_K(k), k);
    CHECK(std::abs(atK.sn - 1.0) <= 1e-12);
    // Zero modulus reduces to circular functions.
    auto circ = qss::jacobi_elliptic(0.9, 0.0);
    CHECK(std::abs(circ.sn - std::sin(0.9)) <= 1e-15);
    CHECK(std::abs(circ.cn - std::cos(0.9)) <= 1e-15);
    CHECK(std::abs(circ.dn - 1.0) <= 1e-15);
}

TEST_CASE("complex Jacobi elliptic functions extend the real ones") {
    const double k = 0.62;
    auto real_val = qss::jacobi_elliptic(0.8, k);
    auto cplx_val = qss::jacobi_elliptic(cplx(0.8, 0.0), k);
    CHECK(std::abs(cplx_val.sn - real_val.sn) <= 1e-13);
    CHECK(std::abs(cplx_val.cn - real_val.cn) <= 1e-13);
    CHECK(std::abs(cplx_val.dn - real_val.dn) <= 1e-13);
    for (cplx u : {cplx(0.5, 0.3), cplx(-0.7, 0.6), cplx(1.2, -0.4)}) {
        auto [sn, cn, dn] = qss::jacobi_elliptic(u, k);
        CHECK(std::abs(sn * sn + cn * cn - cplx(1.0)) <= 1e-12);
        CHECK(std::abs(dn * dn + k * k * sn * sn - cplx(1.0)) <= 1e-12);
    }
}

TEST_CASE("square-root quadrature terms match frozen references") {
    qss::RationalApproximation ra = qss::sqrt_poles(3, 3, 1.0, 4.0);
    CHECK(ra.kind == qss::RationalKind::SqrtMethod3);
    REQUIRE(ra.degree() == 3);
    const double kappa_ref[3] = {-4.96088307177593058e-01, -9.70773111746017214e-01,
                                 -7.27388476734668821e+00};
    const double omega2_ref[3] = {-1.36402575252384944e-01, -1.99999999999999956e+00,
                                  -2.93249595368621918e+01};
    for (std::size_t i = 0; i < 3; ++i) {
        const cplx w2 = ra.terms[i].omega * ra.terms[i].omega;
        CHECK(std::abs(ra.terms[i].kappa.real() - kappa_ref[i]) <=
              1e-12 * std::abs(kappa_ref[i]));
        CHECK(std::abs(ra.terms[i].kappa.imag()) <= 1e-14);
        CHECK(std::abs(w2.real() - omega2_ref[i]) <= 1e-12 * std::abs(omega2_ref[i]));
        CHECK(std::abs(w2.imag()) <= 1e-12);
    }
}

TEST_CASE("method-3 poles sit on the negative real axis") {
    for (std::size_t ell : {1ul, 4ul, 9ul}) {
        qss::RationalApproximation ra = qss::sqrt_poles(3, ell, 0.5, 20.0);
        REQUIRE(ra.degree() == ell);
        for (const auto& term : ra.terms) {
            const cplx w2 = term.omega * term.omega;
            CHECK(w2.real() < 0.0);
            CHECK(std::abs(w2.imag()) <= 1e-12 * std::abs(w2.real()));
        }
    }
}

TEST_CASE("scalar quadrature error decays geometrically and method 3 wins") {
    double prev2 = 0.0, prev3 = 0.0;
    for (std::size_t ell : {4ul, 8ul, 12ul, 16ul}) {
        const double e2 = scalar_sweep_error(qss::sqrt_poles(2, ell, 1.0, 4.0), 1.0, 4.0);
        const double e3 = scalar_sweep_error(qss::sqrt_poles(3, ell, 1.0, 4.0), 1.0, 4.0);
        CHECK(e3 <= e2);
        if (ell > 4) {
            CHECK(e2 <= prev2 / 10.0);
            CHECK(e3 <= std::max(prev3, 1e-14));  // saturates at roundoff
        }
        prev2 = e2;
        prev3 = e3;
    }
    CHECK(prev2 <= 1e-9);   // method 2 at ell=16 on [1,4]
    CHECK(prev3 <= 1e-13);  // method 3 saturated
}

TEST_CASE("sqrt_poles validates its arguments") {
    CHECK_THROWS_AS((void)qss::sqrt_poles(1, 4, 1.0, 2.0), qss::InvalidArgument);
    CHECK_THROWS_AS((void)qss::sqrt_poles(3, 0, 1.0, 2.0), qss::InvalidArgument);
    CHECK_THROWS_AS((void)qss::sqrt_poles(3, 4, 2.0, 1.0), qss::InvalidArgument);
    CHECK_THROWS_AS((void)qss::sqrt_poles(3, 4, -1.0, 2.0), qss::InvalidArgument);
}

TEST_CASE("rational_apply reproduces scalar square roots") {
    // sqrt(2) through the three-term rule on [1,4].
    QSMatrix a2 = scalar_qs(2.0);
    BlockVector one = scalar_vec(1.0);
    BlockVector r3 = qss::rational_apply(a2, one, qss::sqrt_poles(3, 3, 1.0, 4.0));
    CHECK(std::abs(r3.flatten()[0] - cplx(1.4142158185300946)) <= 5e-13);

    // sqrt(4) = 2 to ten digits with sixteen terms.
    QSMatrix a4 = scalar_qs(4.0);
    BlockVector r16 = qss::rational_apply(a4, one, qss::sqrt_poles(3, 16, 1.0, 4.0));
    CHECK(std::abs(r16.flatten()[0] - cplx(2.0)) <= 1e-10);

    // sqrt(1) -> 1 as the degree grows.
    QSMatrix a1 = scalar_qs(1.0);
    BlockVector r = qss::rational_apply(a1, one, qss::sqrt_poles(3, 12, 0.5, 2.0));
    CHECK(std::abs(r.flatten()[0] - cplx(1.0)) <= 1e-10);
}

TEST_CASE("rational_apply matches the dense square root on a matrix operator") {
    QSMatrix cd = qss::convection_diffusion_2d(5, 2.0);
    qss::SpectrumInterval iv = qss::convection_diffusion_spectrum(5, 2.0);
    qss::RationalApproximation ra = qss::sqrt_poles(3, 14, iv.lo, iv.hi);
    BlockVector b = testutil::random_block_vector(cd.structure().m, 77, false);
    BlockVector approx = qss::rational_apply(cd, b, ra);

    qss::DenseMatrix s = qss::dense_sqrt_iterative(qss::to_dense(cd));
    std::vector<cplx> expect = qss::mat_vec(s, b.flatten());
    CHECK(testutil::rel_diff(approx.flatten(), expect) <= 1e-9);
}

TEST_CASE("rational_apply is deterministic across worker counts") {
    struct Reset {
        ~Reset() { qss::detail::set_solver_workers(0); }
    } reset;
    QSMatrix cd = qss::convection_diffusion_2d(4, 1.0);
    qss::SpectrumInterval iv = qss::convection_diffusion_spectrum(4, 1.0);
    qss::RationalApproximation ra = qss::sqrt_poles(3, 9, iv.lo, iv.hi);
    BlockVector b = testutil::random_block_vector(cd.structure().m, 5, false);
    qss::detail::set_solver_workers(1);
    BlockVector one_worker = qss::rational_apply(cd, b, ra);
    qss::detail::set_solver_workers(3);
    BlockVector three_workers = qss::rational_apply(cd, b, ra);
    CHECK(testutil::bitwise_equal(one_worker.flatten(), three_workers.flatten()));
}

TEST_CASE("scalar solution operator has the right values and limits") {
    CHECK(std::abs(qss::bvp_scalar_solution(1.0, kPi) - 0.27202905498213314) <= 1e-15);
    CHECK(qss::bvp_scalar_solution(1.0, kPi) == doctest::Approx(0.27201).epsilon(1e-3));
    CHECK(std::abs(qss::bvp_scalar_solution(0.0, 1.3) - 1.0) <= 1e-14);
    // Continuity through the removable singularity.
    const double near = qss::bvp_scalar_solution(1e-9, 0.7);
    const double nearer = qss::bvp_scalar_solution(1e-12, 0.7);
    CHECK(std::abs(near - 1.0) <= 1e-7);
    CHECK(std::abs(nearer - 1.0) <= 1e-10);
}

TEST_CASE("bvp context precomputes consistent powers") {
    QSMatrix a = laplacian_chain(6);
    BlockVector g = testutil::random_block_vector(a.structure().m, 8, false);
    const std::uint64_t before = qss::shared_factorize_count();
    qss::BVPContext ctx = qss::make_bvp_context(a, g);
    CHECK(qss::shared_factorize_count() == before + 1);  // one factorization of A^2
    BlockVector ag = qss::matvec(a, g);
    BlockVector a2g = qss::matvec(a, ag);
    BlockVector a3g = qss::matvec(a, a2g);
    CHECK(rel_diff(ctx.Ag, ag) <= 1e-14);
    CHECK(rel_diff(ctx.A2g, a2g) <= 1e-14);
    CHECK(rel_diff(ctx.A3g, a3g) <= 1e-14);
}

TEST_CASE("the truncated series at zero terms is the polynomial part") {
    QSMatrix a = laplacian_chain(4);
    BlockVector g = testutil::random_block_vector(a.structure().m, 21, false);
    qss::BVPContext ctx = qss::make_bvp_context(a, g);
    const double t = 1.1;

    BlockVector plain0 = qss::bvp_series_plain(ctx, t, 0);
    BlockVector expect = g;
    qss::axpy_inplace(expect, cplx(-(kPi - t)), ctx.Ag);
    CHECK(rel_diff(plain0, expect) <= 1e-14);

    BlockVector accel0 = qss::bvp_series_accel(ctx, t, 0);
    BlockVector expect2 = g;
    qss::axpy_inplace(expect2, cplx(t - kPi), ctx.Ag);
    qss::axpy_inplace(expect2, cplx(kPi * kPi / 3.0 - kPi * t + t * t / 2.0), ctx.A2g);
    qss::axpy_inplace(expect2,
                      cplx(kPi * kPi * t / 3.0 - kPi * t * t / 2.0 + t * t * t / 6.0),
                      ctx.A3g);
    CHECK(rel_diff(accel0, expect2) <= 1e-14);
}

TEST_CASE("scalar series converge to the scalar solution operator") {
    QSMatrix a = scalar_qs(1.0);
    BlockVector g = scalar_vec(1.0);
    qss::BVPContext ctx = qss::make_bvp_context(a, g);
    const double t = kPi / 2.0;
    const double exact = qss::bvp_scalar_solution(1.0, t);

    BlockVector accel = qss::bvp_series_accel(ctx, t, 500, 0.0);
    CHECK(std::abs(accel.flatten()[0].real() - exact) <= 1e-6);

    // The plain series converges too, just more slowly.
    BlockVector plain = qss::bvp_series_plain(ctx, t, 500, 0.0);
    CHECK(std::abs(plain.flatten()[0].real() - exact) <= 1e-2);
    // And more terms help.
    BlockVector plain_short = qss::bvp_series_plain(ctx, t, 20, 0.0);
    CHECK(std::abs(plain.flatten()[0].real() - exact) <
          std::abs(plain_short.flatten()[0].real() - exact));
}

TEST_CASE("dense oracle reduces to known cases") {
    // Zero operator: the solution is the mean value itself.
    QSMatrix z = qss::from_tridiagonal({0.0}, {0.0, 0.0}, {0.0});
    BlockVector g = BlockVector::from_flat({1.0, -2.0}, {1, 1});
    qss::BVPContext zctx = qss::make_bvp_context(z, g);
    BlockVector v = qss::bvp_exact_dense(zctx, 0.9);
    CHECK(rel_diff(v, g) <= 1e-13);

    // Scalar reduction.
    QSMatrix a = scalar_qs(1.0);
    qss::BVPContext ctx = qss::make_bvp_context(a, scalar_vec(3.0));
    BlockVector w = qss::bvp_exact_dense(ctx, kPi);
    CHECK(std::abs(w.flatten()[0].real() - 3.0 * qss::bvp_scalar_solution(1.0, kPi)) <=
          1e-12);

    // Symmetric matrix: agree with the eigen-decomposed scalar formula.
    QSMatrix lap = laplacian_chain(10);
    BlockVector gl = testutil::random_block_vector(lap.structure().m, 31, false);
    qss::BVPContext lctx = qss::make_bvp_context(lap, gl);
    BlockVector ve = qss::bvp_exact_dense(lctx, 0.4);
    qss::SymEig e = qss::symmetric_eig(qss::to_dense(lap));
    std::vector<cplx> coeff = qss::mat_vec(qss::adjoint(e.vectors), gl.flatten());
    for (std::size_t i = 0; i < coeff.size(); ++i)
        coeff[i] *= qss::bvp_scalar_solution(e.values[i], 0.4);
    std::vector<cplx> expect = qss::mat_vec(e.vectors, coeff);
    CHECK(testutil::rel_diff(ve.flatten(), expect) <= 1e-12);
}

TEST_CASE("series errors fall with the term count and acceleration helps") {
    QSMatrix lap = laplacian_chain(30);
    BlockVector g = testutil::random_block_vector(lap.structure().m, 77, false);
    qss::BVPContext ctx = qss::make_bvp_context(lap, g);
    const double t = kPi / 2.0;
    BlockVector exact = qss::bvp_exact_dense(ctx, t);
    const double scale = qss::norm2(exact);

    auto err = [&](const BlockVector& v) {
        BlockVector d = v;
        qss::axpy_inplace(d, cplx(-1.0), exact);
        return qss::norm2(d) / scale;
    };

    const double plain10 = err(qss::bvp_series_plain(ctx, t, 10, 0.0));
    const double plain100 = err(qss::bvp_series_plain(ctx, t, 100, 0.0));
    const double accel10 = err(qss::bvp_series_accel(ctx, t, 10, 0.0));
    const double accel100 = err(qss::bvp_series_accel(ctx, t, 100, 0.0));
    CHECK(plain100 < plain10);
    CHECK(accel100 < accel10);
    CHECK(accel100 < plain100);
    CHECK(accel10 < plain10);
}

TEST_CASE("series evaluation is smooth in t") {
    QSMatrix lap = laplacian_chain(8);
    BlockVector g = testutil::random_block_vector(lap.structure().m, 3, false);
    qss::BVPContext ctx = qss::make_bvp_context(lap, g);
    BlockVector v1 = qss::bvp_series_plain(ctx, 1.0, 40, 0.0);
    BlockVector v2 = qss::bvp_series_plain(ctx, 1.0 + 1e-12, 40, 0.0);
    CHECK(rel_diff(v1, v2) <= 1e-8);
}

TEST_CASE("spectral interval helper matches the closed form and the eigensolver") {
    qss::SpectrumInterval iv = qss::convection_diffusion_spectrum(50, 10.0);
    CHECK(std::abs(iv.lo - 0.01720330643794865) <= 1e-14);
    CHECK(std::abs(iv.hi - 7.982796693562051) <= 1e-12);

    // Pure diffusion: compare against the dense symmetric eigensolver.
    qss::SpectrumInterval iv0 = qss::convection_diffusion_spectrum(8, 0.0);
    qss::SymEig e = qss::symmetric_eig(qss::to_dense(qss::convection_diffusion_2d(8, 0.0)));
    CHECK(std::abs(iv0.lo - e.values.front()) <= 1e-12);
    CHECK(std::abs(iv0.hi - e.values.back()) <= 1e-12);

    CHECK_THROWS_AS((void)qss::convection_diffusion_spectrum(2, 50.0), qss::InvalidArgument);
}
