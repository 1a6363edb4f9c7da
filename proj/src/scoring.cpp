#include "sazig/scoring.hpp"

#include "sazig/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace sazig {

namespace {

std::optional<ScoreBlock> line_score(const SparseCountMatrix& y, const ModelState& state,
                                     Side side, Eigen::Index idx, CellRef* bad_cell) {
    const SideParams& fixed = (side == Side::Row) ? state.rows : state.cols;
    const SideParams& other = (side == Side::Row) ? state.cols : state.rows;
    const auto& entries = (side == Side::Row) ? y.row(idx) : y.col(idx);
    const Eigen::Index n = other.count();
    const Eigen::Index d = other.dim();
    const double nu = state.shape;

    const Eigen::VectorXd dots = other.vectors * fixed.vectors.row(idx).transpose();

    // Bernoulli part over every cell of the line.
    Eigen::VectorXd resid(n);   // g - p
    Eigen::VectorXd weight(n);  // p (1 - p)
    std::size_t next = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double p = prob(dots[j] + fixed.bias_b[idx] + other.bias_b[j]);
        const bool positive = next < entries.size() && entries[next].first == j;
        if (positive) {
            ++next;
        }
        resid[j] = (positive ? 1.0 : 0.0) - p;
        weight[j] = p * (1.0 - p);
    }

    ScoreBlock block;
    block.has_positive = !entries.empty();
    block.u.resize(d + 2);
    block.s = Eigen::MatrixXd::Zero(d + 2, d + 2);

    block.u.head(d) = other.vectors.transpose() * resid;
    block.u[d] = resid.sum();
    const Eigen::MatrixXd wsqrt =
        other.vectors.array().colwise() * weight.array().sqrt();
    block.s.topLeftCorner(d, d) = wsqrt.transpose() * wsqrt;
    block.s.block(0, d, d, 1) = other.vectors.transpose() * weight;
    block.s(d, d) = weight.sum();

    // Gamma part over the positive cells only.
    const std::size_t m = entries.size();
    double u_e = 0.0;
    double s_ee = 0.0;
    Eigen::MatrixXd pos_vecs(static_cast<Eigen::Index>(m), d);
    Eigen::VectorXd g_grad(static_cast<Eigen::Index>(m));    // score weight per cell
    Eigen::VectorXd g_info(static_cast<Eigen::Index>(m));    // information weight per cell
    for (std::size_t k = 0; k < m; ++k) {
        const Eigen::Index j = entries[k].first;
        const double yv = entries[k].second;
        const double tau_ij = dots[j] + fixed.bias_e[idx] + other.bias_e[j];
        double grad;
        double info;
        if (state.link == Link::Canonical) {
            if (!(tau_ij < 0.0)) {
                if (bad_cell) {
                    *bad_cell = (side == Side::Row) ? CellRef{idx, j} : CellRef{j, idx};
                }
                return std::nullopt;
            }
            grad = nu * (1.0 / tau_ij + yv);
            info = nu / (tau_ij * tau_ij);
        } else {
            const auto mu = mean_from_tau(Link::Log, tau_ij);
            if (!mu) {
                if (bad_cell) {
                    *bad_cell = (side == Side::Row) ? CellRef{idx, j} : CellRef{j, idx};
                }
                return std::nullopt;
            }
            grad = nu * (yv - *mu) / *mu;
            info = nu;
        }
        pos_vecs.row(static_cast<Eigen::Index>(k)) = other.vectors.row(j);
        g_grad[static_cast<Eigen::Index>(k)] = grad;
        g_info[static_cast<Eigen::Index>(k)] = info;
        u_e += grad;
        s_ee += info;
    }
    if (m > 0) {
        block.u.head(d) += pos_vecs.transpose() * g_grad;
        const Eigen::MatrixXd gsqrt = pos_vecs.array().colwise() * g_info.array().sqrt();
        block.s.topLeftCorner(d, d) += gsqrt.transpose() * gsqrt;
        block.s.block(0, d + 1, d, 1) = pos_vecs.transpose() * g_info;
    }
    block.u[d + 1] = u_e;
    block.s(d + 1, d + 1) = s_ee;

    // Mirror the upper triangle; the (b, e) cross entry stays zero.
    block.s.block(d, 0, 1, d) = block.s.block(0, d, d, 1).transpose();
    block.s.block(d + 1, 0, 1, d) = block.s.block(0, d + 1, d, 1).transpose();
    return block;
}

ScoreBlock line_score_or_throw(const SparseCountMatrix& y, const ModelState& state, Side side,
                               Eigen::Index idx) {
    CellRef bad;
    auto block = line_score(y, state, side, idx, &bad);
    if (!block) {
        std::ostringstream msg;
        msg << "invalid mean at cell (" << bad.row << ", " << bad.col << ") under "
            << link_name(state.link) << " link";
        throw InvalidMeanError(bad.row, bad.col, msg.str());
    }
    return std::move(*block);
}

}  // namespace

ScoreBlock score_row(const SparseCountMatrix& y, const ModelState& state, Eigen::Index i) {
    return line_score_or_throw(y, state, Side::Row, i);
}

ScoreBlock score_col(const SparseCountMatrix& y, const ModelState& state, Eigen::Index j) {
    return line_score_or_throw(y, state, Side::Col, j);
}

std::optional<ScoreBlock> try_score_row(const SparseCountMatrix& y, const ModelState& state,
                                        Eigen::Index i, CellRef* bad_cell) {
    return line_score(y, state, Side::Row, i, bad_cell);
}

std::optional<ScoreBlock> try_score_col(const SparseCountMatrix& y, const ModelState& state,
                                        Eigen::Index j, CellRef* bad_cell) {
    return line_score(y, state, Side::Col, j, bad_cell);
}

double default_ridge(const ScoreBlock& block, double scale) {
    return scale * block.s.trace() / static_cast<double>(block.s.rows());
}

Eigen::VectorXd fisher_solve(const ScoreBlock& block, double ridge) {
    if (ridge < 0.0 || !std::isfinite(ridge)) {
        throw std::invalid_argument("fisher_solve: ridge must be finite and non-negative");
    }
    const Eigen::Index full = block.u.size();
    const Eigen::Index k = block.has_positive ? full : full - 1;
    const Eigen::MatrixXd s = block.s.topLeftCorner(k, k);
    const Eigen::VectorXd u = block.u.head(k);
    // Floor used when escalation starts from a zero ridge.
    const double floor = 1e-12 * std::max(1.0, s.trace() / static_cast<double>(k));
    double r = ridge;
    for (int attempt = 0; attempt < 5; ++attempt) {
        Eigen::MatrixXd damped = s;
        damped.diagonal().array() += r;
        Eigen::LLT<Eigen::MatrixXd> llt(damped);
        if (llt.info() == Eigen::Success) {
            Eigen::VectorXd step = llt.solve(u);
            if (step.allFinite()) {
                Eigen::VectorXd out = Eigen::VectorXd::Zero(full);
                out.head(k) = step;
                return out;
            }
        }
        r = (r > 0.0) ? r * 10.0 : floor;
    }
    throw SingularInformationError("information matrix singular after ridge escalation");
}

}  // namespace sazig
