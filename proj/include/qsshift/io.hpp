#pragma once

#include <string>

#include "qsshift/core.hpp"
#include "qsshift/matfun.hpp"

namespace qss {

// File formats
// ------------
// Matrix representation (JSON): one UTF-8 document
//   {"block_sizes": [...],
//    "lower": {"P": [...], "Q": [...], "Xi": [...]},
//    "upper": {"G": [...], "H": [...], "Theta": [...]},
//    "diag": [...]}
// where each generator family is an array of matrices, one per block, each
// matrix a row-major nested array of [re, im] pairs.  Rank arrays are
// inferred from the generator shapes.
//
// Block vector (JSON): array of blocks, each an array of [re, im] pairs.
// A file holding several vectors is an array of such vectors.
//
// Rational approximation (JSON):
//   {"kind": "...", "terms": [{"kappa": [re, im], "omega": [re, im]}, ...]}
//
// Dense matrix (CSV): one row per line, complex entries as "re+imj" tokens
// (e.g. "1.5-0.25j"; a bare real like "2" is accepted on input).

void save_qs(const QSMatrix& a, const std::string& path);
QSMatrix load_qs(const std::string& path);

void save_block_vector(const BlockVector& x, const std::string& path);
BlockVector load_block_vector(const std::string& path);
void save_block_vectors(const std::vector<BlockVector>& xs, const std::string& path);
std::vector<BlockVector> load_block_vectors(const std::string& path);

void save_rational(const RationalApproximation& ra, const std::string& path);
RationalApproximation load_rational(const std::string& path);

void save_csv_matrix(const DenseMatrix& m, const std::string& path);
DenseMatrix load_csv_matrix(const std::string& path);

// "re+imj" token round-trip helpers (full double precision).
cplx parse_complex(const std::string& token);
std::string format_complex(cplx z);

}  // namespace qss
