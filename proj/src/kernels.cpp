#include "qsshift/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>

// LAPACK / BLAS (Fortran symbols, LP64 interface).
extern "C" {
void openblas_set_num_threads(int);
void zgemm_(const char* transa, const char* transb, const int* m, const int* n, const int* k,
            const qss::cplx* alpha, const qss::cplx* a, const int* lda, const qss::cplx* b,
            const int* ldb, const qss::cplx* beta, qss::cplx* c, const int* ldc);
void zgemv_(const char* trans, const int* m, const int* n, const qss::cplx* alpha,
            const qss::cplx* a, const int* lda, const qss::cplx* x, const int* incx,
            const qss::cplx* beta, qss::cplx* y, const int* incy);
void zgeqrf_(const int* m, const int* n, qss::cplx* a, const int* lda, qss::cplx* tau,
             qss::cplx* work, const int* lwork, int* info);
void zungqr_(const int* m, const int* n, const int* k, qss::cplx* a, const int* lda,
             const qss::cplx* tau, qss::cplx* work, const int* lwork, int* info);
void zunmqr_(const char* side, const char* trans, const int* m, const int* n, const int* k,
             const qss::cplx* a, const int* lda, const qss::cplx* tau, qss::cplx* c,
             const int* ldc, qss::cplx* work, const int* lwork, int* info);
void zgesv_(const int* n, const int* nrhs, qss::cplx* a, const int* lda, int* ipiv,
            qss::cplx* b, const int* ldb, int* info);
void dgesv_(const int* n, const int* nrhs, double* a, const int* lda, int* ipiv,
            double* b, const int* ldb, int* info);
}

namespace qss {

namespace {

// The library runs its own task-level concurrency; keep the BLAS engine
// single-threaded so results are reproducible and threads do not oversubscribe.
void ensure_blas_single_threaded() {
    static std::once_flag flag;
    std::call_once(flag, [] { openblas_set_num_threads(1); });
}

int checked_int(std::size_t v) {
    if (v > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw DimensionError("matrix dimension exceeds the 32-bit LAPACK interface");
    return static_cast<int>(v);
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = cplx(1.0, 0.0);
    return m;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("matrix addition shape mismatch");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("matrix subtraction shape mismatch");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
    return c;
}

DenseMatrix operator*(cplx alpha, const DenseMatrix& a) {
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = alpha * a.data()[i];
    return c;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matrix product shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    if (a.rows() == 0 || b.cols() == 0) return c;
    if (a.cols() == 0) return c;  // zero inner dimension: zero matrix
    ensure_blas_single_threaded();
    const int m = checked_int(a.rows());
    const int n = checked_int(b.cols());
    const int k = checked_int(a.cols());
    const cplx one(1.0, 0.0), zero(0.0, 0.0);
    zgemm_("N", "N", &m, &n, &k, &one, a.data(), &m, b.data(), &k, &zero, c.data(), &m);
    return c;
}

DenseMatrix adjoint(const DenseMatrix& a) {
    DenseMatrix c(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) c(j, i) = std::conj(a(i, j));
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix c(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) c(j, i) = a(i, j);
    return c;
}

DenseMatrix slice(const DenseMatrix& a, std::size_t r0, std::size_t nrows,
                  std::size_t c0, std::size_t ncols) {
    if (r0 + nrows > a.rows() || c0 + ncols > a.cols())
        throw DimensionError("slice exceeds matrix bounds");
    DenseMatrix c(nrows, ncols);
    for (std::size_t j = 0; j < ncols; ++j)
        for (std::size_t i = 0; i < nrows; ++i) c(i, j) = a(r0 + i, c0 + j);
    return c;
}

void set_block(DenseMatrix& a, std::size_t r0, std::size_t c0, const DenseMatrix& b) {
    if (r0 + b.rows() > a.rows() || c0 + b.cols() > a.cols())
        throw DimensionError("set_block exceeds matrix bounds");
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = 0; i < b.rows(); ++i) a(r0 + i, c0 + j) = b(i, j);
}

DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom) {
    if (top.cols() != bottom.cols()) throw DimensionError("vstack column mismatch");
    DenseMatrix c(top.rows() + bottom.rows(), top.cols());
    set_block(c, 0, 0, top);
    set_block(c, top.rows(), 0, bottom);
    return c;
}

DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right) {
    if (left.rows() != right.rows()) throw DimensionError("hstack row mismatch");
    DenseMatrix c(left.rows(), left.cols() + right.cols());
    set_block(c, 0, 0, left);
    set_block(c, 0, left.cols(), right);
    return c;
}

double fro_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.data()[i]);
    return std::sqrt(s);
}

double max_abs(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a.data()[i]));
    return s;
}

std::vector<cplx> mat_vec(const DenseMatrix& a, const std::vector<cplx>& x) {
    if (a.cols() != x.size()) throw DimensionError("mat_vec shape mismatch");
    std::vector<cplx> y(a.rows(), cplx(0.0, 0.0));
    if (a.rows() == 0 || a.cols() == 0) return y;
    ensure_blas_single_threaded();
    const int m = checked_int(a.rows());
    const int n = checked_int(a.cols());
    const int inc = 1;
    const cplx one(1.0, 0.0), zero(0.0, 0.0);
    zgemv_("N", &m, &n, &one, a.data(), &m, x.data(), &inc, &zero, y.data(), &inc);
    return y;
}

double norm2(const std::vector<cplx>& x) {
    double s = 0.0;
    for (const cplx& v : x) s += std::norm(v);
    return std::sqrt(s);
}

DenseMatrix column_matrix(const std::vector<cplx>& x) {
    DenseMatrix c(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) c(i, 0) = x[i];
    return c;
}

std::vector<cplx> to_vector(const DenseMatrix& column) {
    if (column.cols() != 1 && !(column.rows() == 0 || column.cols() == 0))
        throw DimensionError("to_vector expects a single-column matrix");
    std::vector<cplx> x(column.rows());
    for (std::size_t i = 0; i < column.rows(); ++i) x[i] = column(i, 0);
    return x;
}

// ---- QRFactors ---------------------------------------------------------------

QRFactors::QRFactors(const DenseMatrix& m)
    : p_(m.rows()), cols_(m.cols()), k_(std::min(m.rows(), m.cols())), af_(m), r_(m.rows(), m.cols()) {
    if (k_ == 0) {
        // Nothing to annihilate: q() is the identity and r is the input.
        r_ = m;
        return;
    }
    ensure_blas_single_threaded();
    const int mm = checked_int(p_);
    const int nn = checked_int(cols_);
    tau_.resize(k_);
    int info = 0;
    int lwork = -1;
    cplx wq;
    zgeqrf_(&mm, &nn, af_.data(), &mm, tau_.data(), &wq, &lwork, &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(static_cast<std::size_t>(std::max(lwork, 1)));
    zgeqrf_(&mm, &nn, af_.data(), &mm, tau_.data(), work.data(), &lwork, &info);
    if (info != 0) throw Error("QR factorization failed (internal)");

    // Extract the raw triangular factor, then pull unimodular scales out of
    // its rows so that the stored diagonal is real and nonnegative.
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i <= std::min(j, k_ - 1); ++i) r_(i, j) = af_(i, j);
    d_.assign(k_, cplx(1.0, 0.0));
    for (std::size_t j = 0; j < k_; ++j) {
        const cplx rjj = r_(j, j);
        const double mag = std::abs(rjj);
        if (mag != 0.0) d_[j] = std::conj(rjj / mag);
        for (std::size_t c = j; c < cols_; ++c) r_(j, c) = d_[j] * r_(j, c);
        r_(j, j) = cplx(std::abs(rjj), 0.0);
    }
}

DenseMatrix QRFactors::q() const {
    if (k_ == 0) return DenseMatrix::identity(p_);
    ensure_blas_single_threaded();
    DenseMatrix qm(p_, p_);
    for (std::size_t j = 0; j < k_; ++j)
        for (std::size_t i = 0; i < p_; ++i) qm(i, j) = af_(i, j);
    const int mm = checked_int(p_);
    const int kk = checked_int(k_);
    int info = 0;
    int lwork = -1;
    cplx wq;
    zungqr_(&mm, &mm, &kk, qm.data(), &mm, tau_.data(), &wq, &lwork, &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(static_cast<std::size_t>(std::max(lwork, 1)));
    zungqr_(&mm, &mm, &kk, qm.data(), &mm, tau_.data(), work.data(), &lwork, &info);
    if (info != 0) throw Error("QR materialization failed (internal)");
    // q * r must reproduce the input: compensate the row scales of r by
    // scaling the matching columns of q with the conjugate factors.
    for (std::size_t j = 0; j < k_; ++j) {
        const cplx s = std::conj(d_[j]);
        for (std::size_t i = 0; i < p_; ++i) qm(i, j) *= s;
    }
    return qm;
}

void QRFactors::apply_adjoint_inplace(DenseMatrix& x) const {
    if (x.rows() != p_) throw DimensionError("apply_adjoint row mismatch");
    if (k_ == 0 || x.cols() == 0) return;
    ensure_blas_single_threaded();
    const int mm = checked_int(p_);
    const int nn = checked_int(x.cols());
    const int kk = checked_int(k_);
    int info = 0;
    int lwork = -1;
    cplx wq;
    zunmqr_("L", "C", &mm, &nn, &kk, af_.data(), &mm, tau_.data(), x.data(), &mm, &wq, &lwork,
            &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(static_cast<std::size_t>(std::max(lwork, 1)));
    zunmqr_("L", "C", &mm, &nn, &kk, af_.data(), &mm, tau_.data(), x.data(), &mm, work.data(),
            &lwork, &info);
    if (info != 0) throw Error("adjoint application failed (internal)");
    for (std::size_t j = 0; j < x.cols(); ++j)
        for (std::size_t i = 0; i < k_; ++i) x(i, j) *= d_[i];
}

DenseMatrix QRFactors::apply_adjoint(const DenseMatrix& x) const {
    DenseMatrix y = x;
    apply_adjoint_inplace(y);
    return y;
}

std::vector<cplx> QRFactors::apply_adjoint(const std::vector<cplx>& x) const {
    DenseMatrix y = column_matrix(x);
    apply_adjoint_inplace(y);
    return to_vector(y);
}

QRFactors qr(const DenseMatrix& m) { return QRFactors(m); }

std::vector<cplx> apply_adjoint(const QRFactors& f, const std::vector<cplx>& x) {
    return f.apply_adjoint(x);
}

// ---- triangular solve ----------------------------------------------------------

double upper_singularity_threshold(const DenseMatrix& r) {
    const std::size_t n = std::min(r.rows(), r.cols());
    double dmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) dmax = std::max(dmax, std::abs(r(j, j)));
    return 1e3 * std::numeric_limits<double>::epsilon() * dmax;
}

DenseMatrix solve_upper(const DenseMatrix& r, const DenseMatrix& b) {
    if (r.rows() != r.cols()) throw DimensionError("solve_upper expects a square factor");
    if (r.rows() != b.rows()) throw DimensionError("solve_upper right-hand side mismatch");
    const std::size_t n = r.rows();
    const double tol = upper_singularity_threshold(r);
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(r(j, j)) <= tol)
            throw SingularDiagonal(j, "triangular pivot " + std::to_string(j) +
                                          " below singularity tolerance");
    DenseMatrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t ii = n; ii > 0; --ii) {
            const std::size_t i = ii - 1;
            cplx s = x(i, c);
            for (std::size_t j = i + 1; j < n; ++j) s -= r(i, j) * x(j, c);
            x(i, c) = s / r(i, i);
        }
    }
    return x;
}

std::vector<cplx> solve_upper(const DenseMatrix& r, const std::vector<cplx>& b) {
    return to_vector(solve_upper(r, column_matrix(b)));
}

// ---- symmetric eigendecomposition ----------------------------------------------

SymEig symmetric_eig(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("symmetric_eig expects a square matrix");
    const std::size_t n = m.rows();
    const double scale = fro_norm(m);
    const double tol_sym = 1e-12 * scale;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(m(i, j).imag()) > tol_sym)
                throw InvalidArgument("symmetric_eig: matrix has a nonreal entry");
            if (std::abs(m(i, j) - m(j, i)) > tol_sym)
                throw InvalidArgument("symmetric_eig: matrix is not symmetric");
        }

    std::vector<double> a(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            a[i + j * n] = 0.5 * (m(i, j).real() + m(j, i).real());
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i + i * n] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (i != j) s += a[i + j * n] * a[i + j * n];
        return std::sqrt(s);
    };

    const double stop = 1e-14 * (scale > 0.0 ? scale : 1.0);
    for (int sweep = 0; sweep < 60 && off_norm() > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p + q * n];
                if (apq == 0.0) continue;
                const double app = a[p + p * n];
                const double aqq = a[q + q * n];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i + p * n];
                    const double aiq = a[i + q * n];
                    a[i + p * n] = c * aip - s * aiq;
                    a[i + q * n] = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a[p + j * n];
                    const double aqj = a[q + j * n];
                    a[p + j * n] = c * apj - s * aqj;
                    a[q + j * n] = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i + p * n];
                    const double viq = v[i + q * n];
                    v[i + p * n] = c * vip - s * viq;
                    v[i + q * n] = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x + x * n] < a[y + y * n]; });

    SymEig out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a[order[j] + order[j] * n];
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, j) = cplx(v[i + order[j] * n], 0.0);
    }
    return out;
}

// ---- dense linear solve -----------------------------------------------------------

namespace {

bool is_real(const DenseMatrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.data()[i].imag() != 0.0) return false;
    return true;
}

}  // namespace

DenseMatrix dense_solve(const DenseMatrix& m, const DenseMatrix& b) {
    if (m.rows() != m.cols()) throw DimensionError("dense_solve expects a square matrix");
    if (m.rows() != b.rows()) throw DimensionError("dense_solve right-hand side mismatch");
    const std::size_t n = m.rows();
    if (n == 0) return b;
    if (b.cols() == 0) return b;
    ensure_blas_single_threaded();
    const int nn = checked_int(n);
    const int nrhs = checked_int(b.cols());
    std::vector<int> ipiv(n);
    int info = 0;
    if (is_real(m) && is_real(b)) {
        std::vector<double> a(n * n), x(n * b.cols());
        for (std::size_t i = 0; i < m.size(); ++i) a[i] = m.data()[i].real();
        for (std::size_t i = 0; i < b.size(); ++i) x[i] = b.data()[i].real();
        dgesv_(&nn, &nrhs, a.data(), &nn, ipiv.data(), x.data(), &nn, &info);
        if (info > 0)
            throw SingularDiagonal(static_cast<std::size_t>(info - 1),
                                   "dense system is singular");
        if (info < 0) throw Error("dense solve failed (internal)");
        DenseMatrix out(n, b.cols());
        for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = cplx(x[i], 0.0);
        return out;
    }
    DenseMatrix a = m;
    DenseMatrix x = b;
    zgesv_(&nn, &nrhs, a.data(), &nn, ipiv.data(), x.data(), &nn, &info);
    if (info > 0)
        throw SingularDiagonal(static_cast<std::size_t>(info - 1), "dense system is singular");
    if (info < 0) throw Error("dense solve failed (internal)");
    return x;
}

std::vector<cplx> dense_solve(const DenseMatrix& m, const std::vector<cplx>& b) {
    return to_vector(dense_solve(m, column_matrix(b)));
}

}  // namespace qss
