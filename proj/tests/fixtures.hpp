#pragma once

// Shared random test instances. Parameters are kept moderate so
// probabilities stay away from saturation and canonical-link natural
// parameters stay strictly negative.

#include "sazig/model.hpp"
#include "sazig/sparse_matrix.hpp"

#include <random>
#include <string>

namespace fixtures {

inline sazig::ModelState random_state(Eigen::Index n_rows, Eigen::Index n_cols,
                                      Eigen::Index d, sazig::Link link, double shape,
                                      std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> uv(-0.5, 0.5);
    std::uniform_real_distribution<double> ub(-1.0, 1.0);
    // Canonical link: tau must stay negative, so bias the Gamma part
    // well below zero; |w.wt| <= d/4 by construction.
    std::uniform_real_distribution<double> ue_canonical(-2.0 - 0.3 * static_cast<double>(d),
                                                        -1.0 - 0.3 * static_cast<double>(d));
    std::uniform_real_distribution<double> ue_log(-0.5, 0.5);

    sazig::ModelState s;
    s.link = link;
    s.shape = shape;
    s.rows = sazig::SideParams::zeros(n_rows, d);
    s.cols = sazig::SideParams::zeros(n_cols, d);
    for (sazig::SideParams* side : {&s.rows, &s.cols}) {
        for (Eigen::Index i = 0; i < side->count(); ++i) {
            for (Eigen::Index k = 0; k < d; ++k) {
                side->vectors(i, k) = uv(eng);
            }
            side->bias_b[i] = ub(eng);
            side->bias_e[i] = (link == sazig::Link::Canonical) ? ue_canonical(eng) / 2.0
                                                               : ue_log(eng);
        }
    }
    return s;
}

inline sazig::SparseCountMatrix random_matrix(Eigen::Index n_rows, Eigen::Index n_cols,
                                              double density, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::gamma_distribution<double> value(3.0, 0.7);
    std::vector<sazig::SparseCountMatrix::Triple> triples;
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            if (coin(eng) < density) {
                triples.push_back({i, j, value(eng) + 1e-3});
            }
        }
    }
    return sazig::SparseCountMatrix::from_triples(triples, n_rows, n_cols);
}

// Unique scratch path inside the build/test working directory.
inline std::string temp_path(const std::string& name) {
    return "sazig_test_" + name;
}

}  // namespace fixtures
