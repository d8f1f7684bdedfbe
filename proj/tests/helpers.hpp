#pragma once

#include <qsshift/core.hpp>

namespace testutil {

using qss::BlockVector;
using qss::cplx;
using qss::DenseMatrix;

inline DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                bool complex_entries = true) {
    qss::UniformRng rng(seed);
    DenseMatrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) {
            const double re = rng.next_symmetric();
            const double im = complex_entries ? rng.next_symmetric() : 0.0;
            m(i, j) = cplx(re, im);
        }
    return m;
}

inline std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed,
                                       bool complex_entries = true) {
    qss::UniformRng rng(seed);
    std::vector<cplx> v(n);
    for (auto& z : v) {
        const double re = rng.next_symmetric();
        const double im = complex_entries ? rng.next_symmetric() : 0.0;
        z = cplx(re, im);
    }
    return v;
}

inline BlockVector random_block_vector(const std::vector<std::size_t>& sizes,
                                       std::uint64_t seed, bool complex_entries = true) {
    std::size_t total = 0;
    for (std::size_t s : sizes) total += s;
    return BlockVector::from_flat(random_vector(total, seed, complex_entries), sizes);
}

inline double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
    const double scale = qss::fro_norm(b);
    return qss::fro_norm(a - b) / (scale > 0.0 ? scale : 1.0);
}

inline double rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num) / (den > 0.0 ? std::sqrt(den) : 1.0);
}

inline double rel_diff(const BlockVector& a, const BlockVector& b) {
    return rel_diff(a.flatten(), b.flatten());
}

inline bool bitwise_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
    return true;
}

inline bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (a(i, j).real() != b(i, j).real() || a(i, j).imag() != b(i, j).imag())
                return false;
    return true;
}

// Dense matrix-vector product (oracle side).
inline std::vector<cplx> dense_matvec(const DenseMatrix& m, const std::vector<cplx>& x) {
    return qss::mat_vec(m, x);
}

}  // namespace testutil
