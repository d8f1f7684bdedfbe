#pragma once

#include <string>

#include "qsshift/shift_solver.hpp"

namespace qss {

// ---- elliptic kernels -------------------------------------------------------

// Complete elliptic integral of the first kind, argument given as the
// MODULUS k in [0, 1) (not the parameter m = k^2).  AGM iteration to full
// double precision.
double elliptic_K(double modulus);

struct JacobiElliptic {
    double sn, cn, dn;
};
// Jacobi elliptic functions for real argument and modulus in [0, 1), by the
// descending Landen (AGM) recurrence.
JacobiElliptic jacobi_elliptic(double u, double modulus);

struct JacobiEllipticComplex {
    cplx sn, cn, dn;
};
// Complex argument via the real/imaginary combination identities with the
// complementary modulus.
JacobiEllipticComplex jacobi_elliptic(cplx u, double modulus);

// ---- rational approximations ------------------------------------------------

enum class RationalKind { SqrtMethod2, SqrtMethod3, UserSupplied };

std::string to_string(RationalKind kind);
RationalKind rational_kind_from_string(const std::string& name);

struct RationalTerm {
    cplx kappa;  // weight
    cplx omega;  // pole parameter; the shifted system uses omega^2
};

// f(A) b ~= sum_k kappa_k (omega_k^2 I - A)^{-1} A b.
struct RationalApproximation {
    RationalKind kind = RationalKind::UserSupplied;
    std::vector<RationalTerm> terms;

    std::size_t degree() const { return terms.size(); }
};

// Elliptic-contour quadrature weights/poles for the matrix square root on a
// positive real spectral interval [lambda_min, lambda_max].  method selects
// between the two classical conformal-map constructions: 2 is the generic
// contour composed with the square-root transform, 3 is the square-root
// specific map whose poles all sit on the negative real axis (omega^2 < 0).
// Accuracy improves geometrically with ell, the faster rate belonging to
// method 3.
RationalApproximation sqrt_poles(int method, std::size_t ell, double lambda_min,
                                 double lambda_max);

// Evaluates sum_k kappa_k (omega_k^2 I - A)^{-1} A b with all shifted solves
// sharing one factorization of -A.
BlockVector rational_apply(const QSMatrix& a, const BlockVector& b,
                           const RationalApproximation& ra);

// ---- boundary-value-problem series -------------------------------------------

// Context for evaluating the solution operator of dv/dt = A v subject to the
// mean condition (1/(2pi)) int_0^{2pi} v = g.  Holds the input data, the
// first three power products, and one factorization of A^2 that every series
// evaluation at any (t, ell) reuses.
struct BVPContext {
    QSMatrix A;
    BlockVector g;
    BlockVector Ag, A2g, A3g;
    SharedFactorization F2;  // factorization of A*A
};

BVPContext make_bvp_context(const QSMatrix& a, const BlockVector& g);

// Truncated partial-fraction series
//   v_ell(t) = g - (pi - t) A g
//            + 2 sum_{k=1..ell} (cos(kt) A + (sin(kt)/k) A^2)(A^2 + k^2 I)^{-1} A g.
// atol < 0 uses the default stopping tolerance 1e-14 * ||g||; atol == 0
// disables early stopping; atol > 0 stops once a term's norm drops below it.
// ell = 0 returns the polynomial part alone (empty sum).
BlockVector bvp_series_plain(const BVPContext& ctx, double t, std::size_t ell,
                             double atol = -1.0);

// Series-accelerated form: the three leading powers are summed explicitly
// through the polynomials
//   V0 = 1, V1 = t - pi, V2 = pi^2/3 - pi t + t^2/2,
//   V3 = pi^2 t/3 - pi t^2/2 + t^3/6,
// and the remainder converges two orders faster:
//   vhat_ell(t) = sum_j V_j(t) A^j g
//               - 2 sum_{k=1..ell} (cos(kt)/k^2 A + sin(kt)/k^3 A^2)(A^2+k^2 I)^{-1} A^3 g.
BlockVector bvp_series_accel(const BVPContext& ctx, double t, std::size_t ell,
                             double atol = -1.0);

// Scalar solution operator q_t(lambda) = 2 pi lambda e^{lambda t} /
// (e^{2 pi lambda} - 1), evaluated stably through the removable singularity
// at lambda = 0.
double bvp_scalar_solution(double lambda, double t);

// Dense eigendecomposition oracle for real symmetric A:
//   v_exact = V diag(q_t(lambda_i)) V^T g.
// Test-scale only.
BlockVector bvp_exact_dense(const BVPContext& ctx, double t);

// ---- spectral interval helper --------------------------------------------------

struct SpectrumInterval {
    double lo, hi;
};

// Extreme eigenvalues of the convection-diffusion operator built by
// convection_diffusion_2d(n, c):
//   4 -+ 2 (1 + sqrt(1 - ch^2)) cos(pi/(n+1)),  ch = c/(2(n+1)),
// valid while ch <= 1 (real spectrum).
SpectrumInterval convection_diffusion_spectrum(std::size_t n, double c);

}  // namespace qss
