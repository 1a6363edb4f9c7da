#include "sazig/sparse_matrix.hpp"

#include "sazig/errors.hpp"
#include "sazig/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sazig {

SparseCountMatrix SparseCountMatrix::from_triples(const std::vector<Triple>& triples,
                                                  Eigen::Index n_rows, Eigen::Index n_cols) {
    if (n_rows < 0 || n_cols < 0) {
        throw std::invalid_argument("sparse: negative dimensions");
    }
    SparseCountMatrix m;
    m.n_rows_ = n_rows;
    m.n_cols_ = n_cols;
    m.rows_.resize(static_cast<std::size_t>(n_rows));
    m.cols_.resize(static_cast<std::size_t>(n_cols));
    for (const Triple& t : triples) {
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
            std::ostringstream msg;
            msg << "sparse: entry (" << t.row << ", " << t.col << ") outside "
                << n_rows << " x " << n_cols;
            throw std::invalid_argument(msg.str());
        }
        if (!(t.value >= 0.0)) {  // also rejects NaN
            std::ostringstream msg;
            msg << "sparse: negative or non-finite value at (" << t.row << ", " << t.col << ")";
            throw std::invalid_argument(msg.str());
        }
        if (t.value == 0.0) {
            continue;  // zeros stay implicit
        }
        m.rows_[static_cast<std::size_t>(t.row)].emplace_back(t.col, t.value);
    }
    std::size_t nnz = 0;
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        auto& r = m.rows_[static_cast<std::size_t>(i)];
        std::sort(r.begin(), r.end());
        for (std::size_t k = 1; k < r.size(); ++k) {
            if (r[k].first == r[k - 1].first) {
                std::ostringstream msg;
                msg << "sparse: duplicate entry at (" << i << ", " << r[k].first << ")";
                throw std::invalid_argument(msg.str());
            }
        }
        nnz += r.size();
        for (const Entry& e : r) {
            m.cols_[static_cast<std::size_t>(e.first)].emplace_back(i, e.second);
        }
    }
    // Column lists come out already sorted because rows were visited in order.
    m.nnz_ = nnz;
    return m;
}

const std::vector<SparseCountMatrix::Entry>& SparseCountMatrix::row(Eigen::Index i) const {
    if (i < 0 || i >= n_rows_) {
        throw std::invalid_argument("sparse: row index out of range");
    }
    return rows_[static_cast<std::size_t>(i)];
}

const std::vector<SparseCountMatrix::Entry>& SparseCountMatrix::col(Eigen::Index j) const {
    if (j < 0 || j >= n_cols_) {
        throw std::invalid_argument("sparse: col index out of range");
    }
    return cols_[static_cast<std::size_t>(j)];
}

double SparseCountMatrix::density() const {
    if (n_rows_ == 0 || n_cols_ == 0) {
        throw std::invalid_argument("sparse: density undefined for empty dimensions");
    }
    return static_cast<double>(nnz_) /
           (static_cast<double>(n_rows_) * static_cast<double>(n_cols_));
}

std::vector<SparseCountMatrix::Triple> SparseCountMatrix::triples() const {
    std::vector<Triple> out;
    out.reserve(nnz_);
    for (Eigen::Index i = 0; i < n_rows_; ++i) {
        for (const Entry& e : rows_[static_cast<std::size_t>(i)]) {
            out.push_back({i, e.first, e.second});
        }
    }
    return out;
}

void SparseCountMatrix::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw FileError("cannot open for writing: " + path);
    }
    out << "#sazig-triples " << n_rows_ << ' ' << n_cols_ << '\n';
    for (Eigen::Index i = 0; i < n_rows_; ++i) {
        for (const Entry& e : rows_[static_cast<std::size_t>(i)]) {
            out << i << '\t' << e.first << '\t' << format_full(e.second) << '\n';
        }
    }
    if (!out) {
        throw FileError("write failed: " + path);
    }
}

SparseCountMatrix SparseCountMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileError("cannot open: " + path);
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw FileError("empty triples file: " + path);
    }
    std::istringstream hs(header);
    std::string magic;
    Eigen::Index n_rows = -1;
    Eigen::Index n_cols = -1;
    hs >> magic >> n_rows >> n_cols;
    if (magic != "#sazig-triples" || n_rows < 0 || n_cols < 0) {
        throw FileError("bad triples header in " + path);
    }
    std::vector<Triple> triples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        Triple t;
        if (!(ls >> t.row >> t.col >> t.value)) {
            throw FileError("bad triples line in " + path + ": " + line);
        }
        triples.push_back(t);
    }
    try {
        return from_triples(triples, n_rows, n_cols);
    } catch (const std::invalid_argument& e) {
        throw FileError(std::string("invalid triples in ") + path + ": " + e.what());
    }
}

}  // namespace sazig
