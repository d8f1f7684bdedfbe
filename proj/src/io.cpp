#include "qsshift/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qss {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("\"" + path + "\": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open \"" + path + "\" for writing");
    out << text;
    if (!out) throw ParseError("failed writing \"" + path + "\"");
}

json pair_of(cplx z) { return json::array({z.real(), z.imag()}); }

cplx pair_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(where + ": expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const DenseMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(pair_of(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Row-major nested arrays -> matrix.  A document cannot state the column
// count of a zero-row matrix, so the caller supplies it.
DenseMatrix matrix_from_json(const json& j, std::size_t cols_if_empty,
                             const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
    const std::size_t rows = j.size();
    if (rows == 0) return DenseMatrix(0, cols_if_empty);
    if (!j[0].is_array()) throw ParseError(where + ": expected nested row arrays");
    const std::size_t cols = j[0].size();
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || row.size() != cols)
            throw ParseError(where + ": ragged row " + std::to_string(i));
        for (std::size_t c = 0; c < cols; ++c)
            m(i, c) = pair_from(row[c], where + "[" + std::to_string(i) + "][" +
                                            std::to_string(c) + "]");
    }
    return m;
}

const json& member(const json& j, const char* key, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing field \"" + key + "\"");
    return *it;
}

std::vector<json> generator_family(const json& j, const char* key, std::size_t n,
                                   const std::string& where) {
    const json& fam = member(j, key, where);
    if (!fam.is_array() || fam.size() != n)
        throw ParseError(where + ": \"" + std::string(key) + "\" must list " +
                         std::to_string(n) + " matrices");
    return std::vector<json>(fam.begin(), fam.end());
}

json block_vector_to_json(const BlockVector& x) {
    json blocks = json::array();
    for (const auto& blk : x.blocks) {
        json b = json::array();
        for (cplx z : blk) b.push_back(pair_of(z));
        blocks.push_back(std::move(b));
    }
    return blocks;
}

BlockVector block_vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of blocks");
    BlockVector x;
    for (std::size_t b = 0; b < j.size(); ++b) {
        const json& blk = j[b];
        if (!blk.is_array())
            throw ParseError(where + ": block " + std::to_string(b) + " must be an array");
        std::vector<cplx> entries;
        entries.reserve(blk.size());
        for (std::size_t i = 0; i < blk.size(); ++i)
            entries.push_back(pair_from(blk[i], where + ": block " + std::to_string(b)));
        x.blocks.push_back(std::move(entries));
    }
    return x;
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& s, const std::string& token) {
    if (s.empty() || s == "+" || s == "-") {
        // bare sign means unit coefficient, as in "+j" / "-j"
        return s == "-" ? -1.0 : 1.0;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("bad numeric token \"" + token + "\"");
    }
    if (used != s.size()) throw ParseError("bad numeric token \"" + token + "\"");
    return v;
}

}  // namespace

// ---- matrix representation ----------------------------------------------------

void save_qs(const QSMatrix& a, const std::string& path) {
    const std::size_t n = a.blocks();
    json doc;
    doc["block_sizes"] = a.structure().m;
    json lower, upper;
    json p = json::array(), q = json::array(), xi = json::array();
    json g = json::array(), h = json::array(), th = json::array(), la = json::array();
    for (std::size_t k = 0; k < n; ++k) {
        p.push_back(matrix_to_json(a.P(k)));
        q.push_back(matrix_to_json(a.Q(k)));
        xi.push_back(matrix_to_json(a.Xi(k)));
        g.push_back(matrix_to_json(a.G(k)));
        h.push_back(matrix_to_json(a.H(k)));
        th.push_back(matrix_to_json(a.Theta(k)));
        la.push_back(matrix_to_json(a.Lambda(k)));
    }
    lower["P"] = std::move(p);
    lower["Q"] = std::move(q);
    lower["Xi"] = std::move(xi);
    upper["G"] = std::move(g);
    upper["H"] = std::move(h);
    upper["Theta"] = std::move(th);
    doc["lower"] = std::move(lower);
    doc["upper"] = std::move(upper);
    doc["diag"] = std::move(la);
    write_text_file(path, doc.dump(1));
}

QSMatrix load_qs(const std::string& path) {
    const json doc = read_json_file(path);
    const std::string where = "\"" + path + "\"";
    if (!doc.is_object()) throw ParseError(where + ": expected a JSON object");

    const json& bs = member(doc, "block_sizes", where);
    if (!bs.is_array() || bs.empty())
        throw ParseError(where + ": \"block_sizes\" must be a nonempty array");
    std::vector<std::size_t> m;
    for (const auto& v : bs) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
            throw ParseError(where + ": block sizes must be positive integers");
        m.push_back(v.get<std::size_t>());
    }
    const std::size_t n = m.size();

    const json& lower = member(doc, "lower", where);
    const json& upper = member(doc, "upper", where);
    const auto jp = generator_family(lower, "P", n, where);
    const auto jq = generator_family(lower, "Q", n, where);
    const auto jxi = generator_family(lower, "Xi", n, where);
    const auto jg = generator_family(upper, "G", n, where);
    const auto jh = generator_family(upper, "H", n, where);
    const auto jth = generator_family(upper, "Theta", n, where);
    const auto jla = generator_family(doc, "diag", n, where);

    // Boundary ranks come from the row counts of Q (lower) and H (upper).
    std::vector<std::size_t> rl(n + 1, 0), ru(n + 1, 0);
    for (std::size_t k = 0; k + 1 < n; ++k) rl[k + 1] = jq[k].size();
    for (std::size_t k = 1; k < n; ++k) ru[k] = jh[k].size();

    std::vector<DenseMatrix> p, q, xi, g, h, th, la;
    for (std::size_t k = 0; k < n; ++k) {
        p.push_back(matrix_from_json(jp[k], rl[k], where + ": P[" + std::to_string(k) + "]"));
        q.push_back(matrix_from_json(jq[k], m[k], where + ": Q[" + std::to_string(k) + "]"));
        xi.push_back(
            matrix_from_json(jxi[k], rl[k], where + ": Xi[" + std::to_string(k) + "]"));
        g.push_back(
            matrix_from_json(jg[k], ru[k + 1], where + ": G[" + std::to_string(k) + "]"));
        h.push_back(matrix_from_json(jh[k], m[k], where + ": H[" + std::to_string(k) + "]"));
        th.push_back(
            matrix_from_json(jth[k], ru[k + 1], where + ": Theta[" + std::to_string(k) + "]"));
        la.push_back(matrix_from_json(jla[k], m[k], where + ": diag[" + std::to_string(k) + "]"));
    }

    try {
        return QSMatrix(BlockStructure{std::move(m), std::move(rl), std::move(ru)},
                        std::move(p), std::move(q), std::move(xi), std::move(g), std::move(h),
                        std::move(th), std::move(la));
    } catch (const Error& e) {
        throw ParseError(where + ": inconsistent generator shapes: " + e.what());
    }
}

// ---- block vectors --------------------------------------------------------------

void save_block_vector(const BlockVector& x, const std::string& path) {
    write_text_file(path, block_vector_to_json(x).dump(1));
}

BlockVector load_block_vector(const std::string& path) {
    return block_vector_from_json(read_json_file(path), "\"" + path + "\"");
}

void save_block_vectors(const std::vector<BlockVector>& xs, const std::string& path) {
    json doc = json::array();
    for (const auto& x : xs) doc.push_back(block_vector_to_json(x));
    write_text_file(path, doc.dump(1));
}

std::vector<BlockVector> load_block_vectors(const std::string& path) {
    const json doc = read_json_file(path);
    const std::string where = "\"" + path + "\"";
    if (!doc.is_array()) throw ParseError(where + ": expected an array of vectors");
    std::vector<BlockVector> xs;
    for (std::size_t i = 0; i < doc.size(); ++i)
        xs.push_back(block_vector_from_json(doc[i], where + ": vector " + std::to_string(i)));
    return xs;
}

// ---- rational approximations ------------------------------------------------------

void save_rational(const RationalApproximation& ra, const std::string& path) {
    json doc;
    doc["kind"] = to_string(ra.kind);
    json terms = json::array();
    for (const auto& t : ra.terms) {
        json term;
        term["kappa"] = pair_of(t.kappa);
        term["omega"] = pair_of(t.omega);
        terms.push_back(std::move(term));
    }
    doc["terms"] = std::move(terms);
    write_text_file(path, doc.dump(1));
}

RationalApproximation load_rational(const std::string& path) {
    const json doc = read_json_file(path);
    const std::string where = "\"" + path + "\"";
    if (!doc.is_object()) throw ParseError(where + ": expected a JSON object");
    const json& kind = member(doc, "kind", where);
    if (!kind.is_string()) throw ParseError(where + ": \"kind\" must be a string");

    RationalApproximation ra;
    ra.kind = rational_kind_from_string(kind.get<std::string>());
    const json& terms = member(doc, "terms", where);
    if (!terms.is_array() || terms.empty())
        throw ParseError(where + ": \"terms\" must be a nonempty array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const json& t = terms[i];
        const std::string at = where + ": term " + std::to_string(i);
        if (!t.is_object()) throw ParseError(at + " must be an object");
        ra.terms.push_back(
            {pair_from(member(t, "kappa", at), at), pair_from(member(t, "omega", at), at)});
    }
    return ra;
}

// ---- CSV dense matrices --------------------------------------------------------------

cplx parse_complex(const std::string& token) {
    const std::string s = trimmed(token);
    if (s.empty()) throw ParseError("empty numeric token");
    const bool has_j = s.back() == 'j' || s.back() == 'i';
    const std::string body = has_j ? s.substr(0, s.size() - 1) : s;
    if (!has_j) return {parse_double(body, token), 0.0};

    // Split re|im at the last +/- that is neither leading nor an exponent
    // sign; no split means a pure imaginary token.
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i > 1; --i) {
        const char c = body[i - 1];
        if ((c == '+' || c == '-') && body[i - 2] != 'e' && body[i - 2] != 'E') {
            split = i - 1;
            break;
        }
    }
    if (split == std::string::npos) return {0.0, parse_double(body, token)};
    return {parse_double(body.substr(0, split), token),
            parse_double(body.substr(split), token)};
}

std::string format_complex(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", z.real());
    std::string out = buf;
    std::snprintf(buf, sizeof buf, "%+.17g", z.imag());
    out += buf;
    out += 'j';
    return out;
}

void save_csv_matrix(const DenseMatrix& m, const std::string& path) {
    std::ostringstream out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_complex(m(i, j));
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

DenseMatrix load_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::vector<std::vector<cplx>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        std::vector<cplx> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(parse_complex(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("\"" + path + "\": ragged row " + std::to_string(rows.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("\"" + path + "\": no data rows");
    DenseMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

}  // namespace qss
