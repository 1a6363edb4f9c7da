#pragma once

#include "sazig/likelihood.hpp"
#include "sazig/model.hpp"
#include "sazig/sparse_matrix.hpp"

#include <optional>

namespace sazig {

// Score vector and Fisher information for one index's stacked
// parameters (vector, Bernoulli bias, Gamma bias), dimension d + 2.
// The Bernoulli part sums over every cell of the line; the Gamma part
// only over its positive cells. The (b, e) cross term is exactly zero.
struct ScoreBlock {
    Eigen::VectorXd u;
    Eigen::MatrixXd s;
    // False when the line has no positive cells: the Gamma bias is then
    // unidentifiable and fisher_solve freezes it.
    bool has_positive = false;
};

ScoreBlock score_row(const SparseCountMatrix& y, const ModelState& state, Eigen::Index i);
ScoreBlock score_col(const SparseCountMatrix& y, const ModelState& state, Eigen::Index j);

std::optional<ScoreBlock> try_score_row(const SparseCountMatrix& y, const ModelState& state,
                                        Eigen::Index i, CellRef* bad_cell = nullptr);
std::optional<ScoreBlock> try_score_col(const SparseCountMatrix& y, const ModelState& state,
                                        Eigen::Index j, CellRef* bad_cell = nullptr);

// Default Tikhonov damping, proportional to the mean diagonal scale.
double default_ridge(const ScoreBlock& block, double scale = 1e-8);

// Solves s * delta = u by Cholesky with `ridge` added to the diagonal.
// On factorization failure the ridge is grown tenfold up to four
// retries before SingularInformationError. When the block has no
// positive cells the Gamma bias component of the step is fixed at zero
// and the reduced system is solved instead.
Eigen::VectorXd fisher_solve(const ScoreBlock& block, double ridge);

}  // namespace sazig
