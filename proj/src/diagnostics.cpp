#include "sazig/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace sazig {

const char* separation_flag_name(SeparationFlag flag) {
    switch (flag) {
        case SeparationFlag::None:
            return "none";
        case SeparationFlag::SaturationWarning:
            return "saturation";
        case SeparationFlag::SuspectedSeparation:
            return "suspected";
    }
    return "none";
}

SeparationFlag saturation_monitor(const std::vector<double>& max_p_history) {
    const std::size_t w = static_cast<std::size_t>(kSaturationWindow);
    if (max_p_history.size() < w) {
        return SeparationFlag::None;
    }
    const std::size_t start = max_p_history.size() - w;
    for (std::size_t k = start + 1; k < max_p_history.size(); ++k) {
        if (!(max_p_history[k] > max_p_history[k - 1])) {
            return SeparationFlag::None;
        }
    }
    if (max_p_history.back() > 1.0 - kSaturationMargin) {
        return SeparationFlag::SaturationWarning;
    }
    return SeparationFlag::None;
}

double line_max_prob(const ModelState& state, Side side, Eigen::Index idx) {
    const SideParams& fixed = (side == Side::Row) ? state.rows : state.cols;
    const SideParams& other = (side == Side::Row) ? state.cols : state.rows;
    double best = 0.0;
    for (Eigen::Index j = 0; j < other.count(); ++j) {
        const double e = fixed.vectors.row(idx).dot(other.vectors.row(j)) +
                         fixed.bias_b[idx] + other.bias_b[j];
        best = std::max(best, prob(e));
    }
    return best;
}

double separation_probe(const SparseCountMatrix& y, const ModelState& state, Side side,
                        Eigen::Index idx) {
    const SideParams& other = (side == Side::Row) ? state.cols : state.rows;
    const auto& entries = (side == Side::Row) ? y.row(idx) : y.col(idx);
    const Eigen::Index n = other.count();
    const Eigen::Index d = other.dim();
    if (entries.empty() || static_cast<Eigen::Index>(entries.size()) == n) {
        return 1.0;  // one-class pattern: any direction works
    }

    // Points are the opposing vectors with an intercept coordinate;
    // labels separate positive cells from zeros.
    Eigen::MatrixXd x(n, d + 1);
    x.leftCols(d) = other.vectors;
    x.col(d).setOnes();
    Eigen::VectorXd label(n);
    std::size_t next = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const bool positive = next < entries.size() && entries[next].first == j;
        if (positive) {
            ++next;
        }
        label[j] = positive ? 1.0 : -1.0;
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
    double best = 0.0;
    const long max_passes = 10 * static_cast<long>(n);
    for (long pass = 0; pass < max_passes; ++pass) {
        long mistakes = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (label[j] * x.row(j).dot(c) <= 0.0) {
                c += label[j] * x.row(j).transpose();
                ++mistakes;
            }
        }
        if (mistakes == 0) {
            return 1.0;  // every point strictly on its own side
        }
        // Score the current direction: count correctly-signed points,
        // requiring the direction to actually discriminate something.
        const Eigen::VectorXd dots = x * c;
        if (dots.cwiseAbs().maxCoeff() > 0.0) {
            long good = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (label[j] * dots[j] >= 0.0) {
                    ++good;
                }
            }
            best = std::max(best, static_cast<double>(good) / static_cast<double>(n));
        }
    }
    return best;
}

}  // namespace sazig
