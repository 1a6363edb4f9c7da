#include "sazig/likelihood.hpp"

#include "sazig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sazig {

double zig_logpdf(double y, double p, double mu, double nu) {
    if (y < 0.0 || !std::isfinite(y)) {
        throw std::invalid_argument("zig_logpdf: y must be finite and non-negative");
    }
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("zig_logpdf: p must lie strictly inside (0, 1)");
    }
    if (!(mu > 0.0) || !(nu > 0.0)) {
        throw std::invalid_argument("zig_logpdf: mu and nu must be positive");
    }
    if (y == 0.0) {
        return std::log1p(-p);
    }
    return std::log(p) - std::lgamma(nu) + nu * std::log(nu * y / mu) - std::log(y) -
           nu * y / mu;
}

namespace {

double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

// Shared body for both orientations. `side` picks which index sweeps:
// for a row likelihood the fixed index i lives on the row side and j
// runs over all columns, and vice versa.
std::optional<LossBreakdown> line_loglik(const SparseCountMatrix& y, const ModelState& state,
                                         Side side, Eigen::Index idx, CellRef* bad_cell) {
    const SideParams& fixed = (side == Side::Row) ? state.rows : state.cols;
    const SideParams& other = (side == Side::Row) ? state.cols : state.rows;
    const auto& entries = (side == Side::Row) ? y.row(idx) : y.col(idx);
    const Eigen::Index n_other = other.count();
    const double nu = state.shape;

    LossBreakdown out;
    std::size_t next = 0;  // walks the sorted positive entries
    for (Eigen::Index j = 0; j < n_other; ++j) {
        const double dot = fixed.vectors.row(idx).dot(other.vectors.row(j));
        const double eta_ij = dot + fixed.bias_b[idx] + other.bias_b[j];
        const bool positive = next < entries.size() && entries[next].first == j;
        // p and 1 - p computed as two logistic evaluations so neither
        // tail loses precision before the clamp.
        if (positive) {
            out.bern += std::log(clamp_prob(prob(eta_ij)));
            const double yv = entries[next].second;
            ++next;
            const double tau_ij = dot + fixed.bias_e[idx] + other.bias_e[j];
            const auto mu = mean_from_tau(state.link, tau_ij);
            if (!mu) {
                if (bad_cell) {
                    *bad_cell = (side == Side::Row) ? CellRef{idx, j} : CellRef{j, idx};
                }
                return std::nullopt;
            }
            out.gamma += -std::lgamma(nu) + nu * std::log(nu * yv / *mu) - std::log(yv) -
                         nu * yv / *mu;
        } else {
            out.bern += std::log(clamp_prob(prob(-eta_ij)));
        }
    }
    out.total = out.bern + out.gamma;
    if (!std::isfinite(out.total)) {
        return std::nullopt;
    }
    return out;
}

LossBreakdown line_loglik_or_throw(const SparseCountMatrix& y, const ModelState& state,
                                   Side side, Eigen::Index idx) {
    CellRef bad;
    const auto r = line_loglik(y, state, side, idx, &bad);
    if (!r) {
        if (bad.row >= 0) {
            std::ostringstream msg;
            msg << "invalid mean at cell (" << bad.row << ", " << bad.col << ") under "
                << link_name(state.link) << " link";
            throw InvalidMeanError(bad.row, bad.col, msg.str());
        }
        throw std::invalid_argument("likelihood: non-finite log likelihood");
    }
    return *r;
}

}  // namespace

LossBreakdown row_loglik(const SparseCountMatrix& y, const ModelState& state, Eigen::Index i) {
    return line_loglik_or_throw(y, state, Side::Row, i);
}

LossBreakdown col_loglik(const SparseCountMatrix& y, const ModelState& state, Eigen::Index j) {
    return line_loglik_or_throw(y, state, Side::Col, j);
}

std::optional<LossBreakdown> try_row_loglik(const SparseCountMatrix& y, const ModelState& state,
                                            Eigen::Index i, CellRef* bad_cell) {
    return line_loglik(y, state, Side::Row, i, bad_cell);
}

std::optional<LossBreakdown> try_col_loglik(const SparseCountMatrix& y, const ModelState& state,
                                            Eigen::Index j, CellRef* bad_cell) {
    return line_loglik(y, state, Side::Col, j, bad_cell);
}

double total_loss(const SparseCountMatrix& y, const ModelState& state) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.n_rows(); ++i) {
        ll += row_loglik(y, state, i).total;
    }
    return -ll;
}

double estimate_shape(const SparseCountMatrix& y) {
    // Method of moments on y scaled by the row's mean positive value:
    // those ratios have variance 1/nu under the model.
    std::vector<double> ratios;
    ratios.reserve(y.nnz());
    for (Eigen::Index i = 0; i < y.n_rows(); ++i) {
        const auto& entries = y.row(i);
        if (entries.empty()) {
            continue;
        }
        double mean = 0.0;
        for (const auto& e : entries) {
            mean += e.second;
        }
        mean /= static_cast<double>(entries.size());
        for (const auto& e : entries) {
            ratios.push_back(e.second / mean);
        }
    }
    if (ratios.size() < 2) {
        throw std::invalid_argument("estimate_shape: needs at least two positive entries");
    }
    double mean = 0.0;
    for (double r : ratios) {
        mean += r;
    }
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) {
        var += (r - mean) * (r - mean);
    }
    var /= static_cast<double>(ratios.size() - 1);
    if (var == 0.0) {
        throw std::invalid_argument("estimate_shape: zero variance in scaled positives");
    }
    return std::clamp(mean * mean / var, 0.1, 1e4);
}

}  // namespace sazig
