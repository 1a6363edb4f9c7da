#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace sazig {

// Immutable sparse non-negative matrix with both row-major and
// column-major views over the same positive entries. Zeros are
// represented implicitly; training code iterates explicit entries for
// the Gamma part and the full index range for the Bernoulli part.
class SparseCountMatrix {
public:
    struct Triple {
        Eigen::Index row = 0;
        Eigen::Index col = 0;
        double value = 0.0;
    };

    // (index on the other axis, value), sorted ascending by index
    using Entry = std::pair<Eigen::Index, double>;

    // Validates and ingests triples: entries out of range, negative
    // values, and duplicate (row, col) keys all throw
    // std::invalid_argument. Exact zeros are dropped.
    static SparseCountMatrix from_triples(const std::vector<Triple>& triples,
                                          Eigen::Index n_rows, Eigen::Index n_cols);

    Eigen::Index n_rows() const { return n_rows_; }
    Eigen::Index n_cols() const { return n_cols_; }
    std::size_t nnz() const { return nnz_; }

    const std::vector<Entry>& row(Eigen::Index i) const;
    const std::vector<Entry>& col(Eigen::Index j) const;

    // Fraction of cells holding a positive value; throws if either
    // dimension is zero.
    double density() const;

    // Row-major (row, then col) listing of the positive entries.
    std::vector<Triple> triples() const;

    // Plain-text triples format: a "#sazig-triples n_rows n_cols"
    // header followed by one tab-separated "i j y" line per entry,
    // written row-major with 17 significant digits so values
    // round-trip exactly.
    void save(const std::string& path) const;
    static SparseCountMatrix load(const std::string& path);

private:
    SparseCountMatrix() = default;

    Eigen::Index n_rows_ = 0;
    Eigen::Index n_cols_ = 0;
    std::size_t nnz_ = 0;
    std::vector<std::vector<Entry>> rows_;
    std::vector<std::vector<Entry>> cols_;
};

}  // namespace sazig
