#include "qsshift/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qss {

namespace {

constexpr double kPi = std::numbers::pi;

// Science-grade guard for the dense eigendecomposition oracle.
constexpr std::size_t kDenseOracleGuard = 500;

}  // namespace

// ---- elliptic kernels -------------------------------------------------------

double elliptic_K(double modulus) {
    if (!(modulus >= 0.0) || modulus >= 1.0)
        throw InvalidArgument("elliptic_K needs a modulus in [0, 1)");
    double a = 1.0;
    double b = std::sqrt(1.0 - modulus * modulus);
    for (int i = 0; i < 60 && std::abs(a - b) > 2e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return kPi / (2.0 * a);
}

JacobiElliptic jacobi_elliptic(double u, double modulus) {
    if (!(modulus >= 0.0) || modulus >= 1.0)
        throw InvalidArgument("jacobi_elliptic needs a modulus in [0, 1)");
    const double k = modulus;
    if (k < 1e-10) {
        const double s = std::sin(u);
        const double c = std::cos(u);
        return {s, c, std::sqrt(1.0 - (k * s) * (k * s))};
    }
    // Ascending AGM sequence, then the descending amplitude recurrence.
    double a[62], c[62];
    a[0] = 1.0;
    c[0] = k;
    double b = std::sqrt(1.0 - k * k);
    int n = 0;
    while (std::abs(c[n]) > 2e-16 * a[n] && n < 60) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i > 0; --i) {
        const double arg = std::clamp(c[i] * std::sin(phi) / a[i], -1.0, 1.0);
        phi = 0.5 * (phi + std::asin(arg));
    }
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    const double dn = std::sqrt(1.0 - (k * sn) * (k * sn));
    return {sn, cn, dn};
}

JacobiEllipticComplex jacobi_elliptic(cplx u, double modulus) {
    const double k = modulus;
    const double kp = std::sqrt(1.0 - k * k);
    const auto [s, c, d] = jacobi_elliptic(u.real(), k);
    const auto [s1, c1, d1] = jacobi_elliptic(u.imag(), kp);
    const double den = c1 * c1 + (k * s * s1) * (k * s * s1);
    return {cplx(s * d1, c * d * s1 * c1) / den, cplx(c * c1, -s * d * s1 * d1) / den,
            cplx(d * c1 * d1, -k * k * s * c * s1) / den};
}

// ---- rational approximations ------------------------------------------------

std::string to_string(RationalKind kind) {
    switch (kind) {
        case RationalKind::SqrtMethod2: return "sqrt_method2";
        case RationalKind::SqrtMethod3: return "sqrt_method3";
        case RationalKind::UserSupplied: return "user_supplied";
    }
    throw InvalidArgument("unknown rational kind");
}

RationalKind rational_kind_from_string(const std::string& name) {
    if (name == "sqrt_method2") return RationalKind::SqrtMethod2;
    if (name == "sqrt_method3") return RationalKind::SqrtMethod3;
    if (name == "user_supplied") return RationalKind::UserSupplied;
    throw ParseError("unknown rational kind \"" + name + "\"");
}

RationalApproximation sqrt_poles(int method, std::size_t ell, double lambda_min,
                                 double lambda_max) {
    if (method != 2 && method != 3) throw InvalidArgument("sqrt_poles method must be 2 or 3");
    if (ell < 1) throw InvalidArgument("sqrt_poles needs at least one term");
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min))
        throw InvalidArgument("sqrt_poles needs 0 < lambda_min < lambda_max");

    RationalApproximation ra;
    ra.terms.reserve(ell);
    if (method == 3) {
        ra.kind = RationalKind::SqrtMethod3;
        // Imaginary-axis contour through the substitution
        // s = sqrt(lambda_min) sn/cn with modulus kc, kc^2 = 1 - lo/hi.
        const double kc = std::sqrt(1.0 - lambda_min / lambda_max);
        const double kk = elliptic_K(kc);
        const double sqlo = std::sqrt(lambda_min);
        for (std::size_t j = 1; j <= ell; ++j) {
            const double u = (static_cast<double>(j) - 0.5) * kk / static_cast<double>(ell);
            const auto [sn, cn, dn] = jacobi_elliptic(u, kc);
            const double s = sqlo * sn / cn;
            const double kappa = -(2.0 * kk * sqlo / (kPi * static_cast<double>(ell))) * dn /
                                 (cn * cn);
            ra.terms.push_back({cplx(kappa, 0.0), cplx(0.0, s)});
        }
    } else {
        ra.kind = RationalKind::SqrtMethod2;
        // Moebius + sn map from the annulus around the interval
        // [sqrt(lo), sqrt(hi)], midpoint rule over the full period 4K.  The
        // parameterization runs clockwise, hence the negated weights.
        const double cond = lambda_max / lambda_min;
        const double k = (std::pow(cond, 0.25) - 1.0) / (std::pow(cond, 0.25) + 1.0);
        const double cc = std::pow(lambda_min * lambda_max, 0.25);
        const double kk = elliptic_K(k);
        const double kkp = elliptic_K(std::sqrt(1.0 - k * k));
        for (std::size_t j = 1; j <= ell; ++j) {
            const cplx t(-kk + (static_cast<double>(j) - 0.5) * 4.0 * kk /
                                   static_cast<double>(ell),
                         0.5 * kkp);
            const auto [sn, cn, dn] = jacobi_elliptic(t, k);
            const cplx denom = 1.0 / k - sn;
            const cplx z = cc * (1.0 / k + sn) / denom;
            const cplx dzdt = (2.0 * cc / k) * cn * dn / (denom * denom);
            const cplx kappa = -(4.0 * kk / (kPi * cplx(0.0, 1.0) *
                                             static_cast<double>(ell))) *
                               dzdt;
            ra.terms.push_back({kappa, z});
        }
    }
    return ra;
}

BlockVector rational_apply(const QSMatrix& a, const BlockVector& b,
                           const RationalApproximation& ra) {
    if (ra.terms.empty()) throw InvalidArgument("rational approximation has no terms");
    const BlockVector ab = matvec(a, b);
    const QSMatrix minus_a = scale(a, cplx(-1.0, 0.0));
    const SharedFactorization f = shared_factorize(minus_a);

    std::vector<cplx> shifts;
    shifts.reserve(ra.terms.size());
    for (const auto& term : ra.terms) shifts.push_back(term.omega * term.omega);
    const std::vector<BlockVector> sols =
        solve_many(f, shifts, std::vector<BlockVector>(ra.terms.size(), ab));

    BlockVector acc = scaled(ra.terms[0].kappa, sols[0]);
    for (std::size_t k = 1; k < ra.terms.size(); ++k)
        axpy_inplace(acc, ra.terms[k].kappa, sols[k]);
    return acc;
}

// ---- boundary-value-problem series -------------------------------------------

BVPContext make_bvp_context(const QSMatrix& a, const BlockVector& g) {
    BlockVector ag = matvec(a, g);
    BlockVector a2g = matvec(a, ag);
    BlockVector a3g = matvec(a, a2g);
    SharedFactorization f2 = shared_factorize(multiply(a, a));
    return BVPContext{a, g, std::move(ag), std::move(a2g), std::move(a3g), std::move(f2)};
}

namespace {

double resolve_atol(const BVPContext& ctx, double atol) {
    return atol < 0.0 ? 1e-14 * norm2(ctx.g) : atol;
}

}  // namespace

BlockVector bvp_series_plain(const BVPContext& ctx, double t, std::size_t ell, double atol) {
    const double stop = resolve_atol(ctx, atol);
    BlockVector v = ctx.g;
    axpy_inplace(v, cplx(-(kPi - t), 0.0), ctx.Ag);
    for (std::size_t k = 1; k <= ell; ++k) {
        const double kd = static_cast<double>(k);
        const BlockVector xk = solve_shifted(ctx.F2, cplx(kd * kd, 0.0), ctx.Ag);
        const BlockVector ax = matvec(ctx.A, xk);
        const BlockVector a2x = matvec(ctx.A, ax);
        BlockVector term = scaled(cplx(2.0 * std::cos(kd * t), 0.0), ax);
        axpy_inplace(term, cplx(2.0 * std::sin(kd * t) / kd, 0.0), a2x);
        axpy_inplace(v, cplx(1.0, 0.0), term);
        if (stop > 0.0 && norm2(term) <= stop) break;
    }
    return v;
}

BlockVector bvp_series_accel(const BVPContext& ctx, double t, std::size_t ell, double atol) {
    const double stop = resolve_atol(ctx, atol);
    const double v1 = t - kPi;
    const double v2 = kPi * kPi / 3.0 - kPi * t + t * t / 2.0;
    const double v3 = kPi * kPi * t / 3.0 - kPi * t * t / 2.0 + t * t * t / 6.0;
    BlockVector v = ctx.g;
    axpy_inplace(v, cplx(v1, 0.0), ctx.Ag);
    axpy_inplace(v, cplx(v2, 0.0), ctx.A2g);
    axpy_inplace(v, cplx(v3, 0.0), ctx.A3g);
    for (std::size_t k = 1; k <= ell; ++k) {
        const double kd = static_cast<double>(k);
        const BlockVector yk = solve_shifted(ctx.F2, cplx(kd * kd, 0.0), ctx.A3g);
        const BlockVector ay = matvec(ctx.A, yk);
        const BlockVector a2y = matvec(ctx.A, ay);
        BlockVector term = scaled(cplx(-2.0 * std::cos(kd * t) / (kd * kd), 0.0), ay);
        axpy_inplace(term, cplx(-2.0 * std::sin(kd * t) / (kd * kd * kd), 0.0), a2y);
        axpy_inplace(v, cplx(1.0, 0.0), term);
        if (stop > 0.0 && norm2(term) <= stop) break;
    }
    return v;
}

double bvp_scalar_solution(double lambda, double t) {
    const double tau = 2.0 * kPi;
    const double z = tau * lambda;
    if (std::abs(z) < 1e-6) {
        // z/(e^z - 1) = 1 - z/2 + z^2/12 - ... ; enough terms at this size.
        return (1.0 - z / 2.0 + z * z / 12.0) * std::exp(lambda * t);
    }
    return z * std::exp(lambda * t) / std::expm1(z);
}

BlockVector bvp_exact_dense(const BVPContext& ctx, double t) {
    const std::size_t total = ctx.A.total();
    if (total > kDenseOracleGuard)
        throw GuardExceeded("bvp_exact_dense limited to " +
                            std::to_string(kDenseOracleGuard) + " rows, got " +
                            std::to_string(total));
    const SymEig eig = symmetric_eig(to_dense(ctx.A));

    const std::vector<cplx> g = ctx.g.flatten();
    std::vector<cplx> w(total, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < total; ++j) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < total; ++i) acc += eig.vectors(i, j) * g[i];
        w[j] = acc * bvp_scalar_solution(eig.values[j], t);
    }
    std::vector<cplx> out(total, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < total; ++j)
        for (std::size_t i = 0; i < total; ++i) out[i] += eig.vectors(i, j) * w[j];

    std::vector<std::size_t> sizes;
    for (const auto& blk : ctx.g.blocks) sizes.push_back(blk.size());
    return BlockVector::from_flat(out, sizes);
}

// ---- spectral interval helper --------------------------------------------------

SpectrumInterval convection_diffusion_spectrum(std::size_t n, double c) {
    if (n < 2) throw InvalidArgument("convection_diffusion_spectrum needs n >= 2");
    const double ch = c / (2.0 * (static_cast<double>(n) + 1.0));
    if (std::abs(ch) > 1.0)
        throw InvalidArgument(
            "convection_diffusion_spectrum: |c|/(2(n+1)) > 1 makes the spectrum complex");
    const double s = std::sqrt(1.0 - ch * ch);
    const double wing = 2.0 * (1.0 + s) * std::cos(kPi / (static_cast<double>(n) + 1.0));
    return {4.0 - wing, 4.0 + wing};
}

}  // namespace qss
