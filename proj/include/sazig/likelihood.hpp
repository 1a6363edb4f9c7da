#pragma once

#include "sazig/model.hpp"
#include "sazig/sparse_matrix.hpp"

#include <optional>

namespace sazig {

// Saturated probabilities are clamped into [kProbClamp, 1 - kProbClamp]
// before taking logs so the loss stays finite even when the Bernoulli
// part saturates.
inline constexpr double kProbClamp = 1e-12;

// Zero-inflated Gamma log density: point mass 1 - p at zero, Gamma with
// mean mu and shape nu with probability p. Callers clamp p away from
// the endpoints first. Throws std::invalid_argument on y < 0,
// non-positive mu or nu, or p outside (0, 1).
double zig_logpdf(double y, double p, double mu, double nu);

struct LossBreakdown {
    double bern = 0.0;
    double gamma = 0.0;
    double total = 0.0;
};

struct CellRef {
    Eigen::Index row = -1;
    Eigen::Index col = -1;
};

// Log likelihood of one row (all n_cols Bernoulli terms, Gamma terms at
// the row's positive cells). Throws InvalidMeanError when the link
// produces an invalid mean at a positive cell.
LossBreakdown row_loglik(const SparseCountMatrix& y, const ModelState& state, Eigen::Index i);
LossBreakdown col_loglik(const SparseCountMatrix& y, const ModelState& state, Eigen::Index j);

// Non-throwing variants for step validation in the trainer: nullopt on
// an invalid mean (bad_cell set when provided) and on a non-finite
// result.
std::optional<LossBreakdown> try_row_loglik(const SparseCountMatrix& y, const ModelState& state,
                                            Eigen::Index i, CellRef* bad_cell = nullptr);
std::optional<LossBreakdown> try_col_loglik(const SparseCountMatrix& y, const ModelState& state,
                                            Eigen::Index j, CellRef* bad_cell = nullptr);

// Negative total log likelihood, all constants included.
double total_loss(const SparseCountMatrix& y, const ModelState& state);

// Moment estimate of the global Gamma shape: pools y / (row mean of
// positives) over all positive entries and returns mean^2 / variance,
// clamped into [0.1, 1e4]. Throws std::invalid_argument with fewer
// than two positive entries or zero variance.
double estimate_shape(const SparseCountMatrix& y);

}  // namespace sazig
