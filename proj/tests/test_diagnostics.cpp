#include "sazig/diagnostics.hpp"

#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <random>

using namespace sazig;

TEST_CASE("saturation_monitor") {
    SUBCASE("strictly increasing into the saturated zone flags") {
        const std::vector<double> h{0.91, 0.95, 0.99, 0.9999, 1.0 - 1e-9};
        CHECK(saturation_monitor(h) == SeparationFlag::SaturationWarning);
    }
    SUBCASE("increasing but below the threshold does not flag") {
        const std::vector<double> h{0.1, 0.2, 0.3, 0.4, 0.9};
        CHECK(saturation_monitor(h) == SeparationFlag::None);
    }
    SUBCASE("a plateau breaks the strict increase") {
        const std::vector<double> h{0.91, 0.95, 0.95, 0.9999, 1.0 - 1e-9};
        CHECK(saturation_monitor(h) == SeparationFlag::None);
    }
    SUBCASE("short histories never flag") {
        const std::vector<double> h{0.99, 0.999, 1.0 - 1e-9};
        CHECK(saturation_monitor(h) == SeparationFlag::None);
    }
    SUBCASE("only the final window matters") {
        const std::vector<double> h{1.0 - 1e-9, 0.5, 0.6, 0.7, 0.8, 1.0 - 1e-9};
        // Last five: 0.5 < 0.6 < 0.7 < 0.8 < 1 - 1e-9, strictly
        // increasing and saturated.
        CHECK(saturation_monitor(h) == SeparationFlag::SaturationWarning);
    }
}

namespace {

// Builds a one-row problem whose zero/positive pattern is given by
// labels over the provided column vectors.
struct ProbeFixture {
    SparseCountMatrix matrix;
    ModelState state;
};

ProbeFixture probe_fixture(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    std::vector<SparseCountMatrix::Triple> triples;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (labels[static_cast<std::size_t>(j)] > 0) {
            triples.push_back({0, j, 1.0});
        }
    }
    ProbeFixture f{SparseCountMatrix::from_triples(triples, 1, n), {}};
    f.state.link = Link::Log;
    f.state.shape = 1.0;
    f.state.rows = SideParams::zeros(1, d);
    f.state.cols = SideParams::zeros(n, d);
    f.state.cols.vectors = points;
    return f;
}

}  // namespace

TEST_CASE("separation_probe certifies separable patterns") {
    // Labels produced by a known direction with a real margin must be
    // recovered by the perceptron.
    std::mt19937_64 eng(201);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index n = 12 + rep % 5;
        const Eigen::Index d = 1 + rep % 3;
        Eigen::MatrixXd pts(n, d);
        Eigen::VectorXd c(d + 1);
        for (Eigen::Index k = 0; k < d + 1; ++k) {
            c[k] = oracle::runif(eng, -1.0, 1.0);
        }
        std::vector<int> labels(static_cast<std::size_t>(n));
        bool has_pos = false;
        bool has_zero = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            double dot;
            do {
                for (Eigen::Index k = 0; k < d; ++k) {
                    pts(j, k) = oracle::runif(eng, -2.0, 2.0);
                }
                dot = pts.row(j).dot(c.head(d)) + c[d];
            } while (std::abs(dot) < 0.05);  // enforce a margin
            labels[static_cast<std::size_t>(j)] = dot > 0.0 ? 1 : 0;
            (dot > 0.0 ? has_pos : has_zero) = true;
        }
        if (!has_pos || !has_zero) {
            continue;  // trivial either way
        }
        const auto f = probe_fixture(pts, labels);
        CHECK(separation_probe(f.matrix, f.state, Side::Row, 0) == 1.0);
    }
}

TEST_CASE("separation_probe scores overlapping patterns below one") {
    // Every point duplicated with both labels: no direction can sign
    // all of them correctly once any dot product is nonzero.
    std::mt19937_64 eng(202);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Index half = 8;
        const Eigen::Index d = 1 + rep % 3;
        Eigen::MatrixXd pts(2 * half, d);
        std::vector<int> labels(static_cast<std::size_t>(2 * half));
        for (Eigen::Index j = 0; j < half; ++j) {
            for (Eigen::Index k = 0; k < d; ++k) {
                pts(j, k) = oracle::runif(eng, -2.0, 2.0);
                pts(half + j, k) = pts(j, k);
            }
            labels[static_cast<std::size_t>(j)] = 1;
            labels[static_cast<std::size_t>(half + j)] = 0;
        }
        const auto f = probe_fixture(pts, labels);
        CHECK(separation_probe(f.matrix, f.state, Side::Row, 0) < 1.0);
    }
}

TEST_CASE("separation_probe agrees with a grid search oracle in low dimension") {
    std::mt19937_64 eng(203);
    int checked = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const Eigen::Index n = 10;
        const Eigen::Index d = 1 + rep % 2;  // augmented space is 2- or 3-dimensional
        Eigen::MatrixXd pts(n, d);
        std::vector<int> labels(static_cast<std::size_t>(n));
        bool has_pos = false;
        bool has_zero = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < d; ++k) {
                pts(j, k) = oracle::runif(eng, -1.5, 1.5);
            }
            labels[static_cast<std::size_t>(j)] = oracle::runif(eng, 0.0, 1.0) < 0.5 ? 1 : 0;
            (labels[static_cast<std::size_t>(j)] ? has_pos : has_zero) = true;
        }
        if (!has_pos || !has_zero) {
            continue;
        }
        Eigen::MatrixXd aug(n, d + 1);
        aug.leftCols(d) = pts;
        aug.col(d).setOnes();
        std::vector<int> pm(labels.size());
        for (std::size_t k = 0; k < labels.size(); ++k) {
            pm[k] = labels[k] ? 1 : -1;
        }
        const bool separable = oracle::grid_separable(aug, pm);
        const auto f = probe_fixture(pts, labels);
        const double score = separation_probe(f.matrix, f.state, Side::Row, 0);
        if (separable) {
            CHECK(score == 1.0);
        }
        if (score == 1.0 && !separable) {
            // The grid has finite resolution; a perceptron certificate
            // must then exist, so re-verify with a fine grid before
            // declaring failure.
            CHECK(oracle::grid_separable(aug, pm, 100000));
        }
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("one-class lines are trivially separated") {
    const Eigen::Index n = 6;
    Eigen::MatrixXd pts = Eigen::MatrixXd::Random(n, 2);
    std::vector<int> all_pos(static_cast<std::size_t>(n), 1);
    auto f = probe_fixture(pts, all_pos);
    CHECK(separation_probe(f.matrix, f.state, Side::Row, 0) == 1.0);
    std::vector<int> all_zero(static_cast<std::size_t>(n), 0);
    f = probe_fixture(pts, all_zero);
    CHECK(separation_probe(f.matrix, f.state, Side::Row, 0) == 1.0);
}

TEST_CASE("line_max_prob finds the largest fitted probability") {
    auto state = fixtures::random_state(2, 6, 2, Link::Log, 1.0, 204);
    double expect = 0.0;
    for (Eigen::Index j = 0; j < 6; ++j) {
        expect = std::max(expect, prob(eta(state.rows, 1, state.cols, j)));
    }
    CHECK(line_max_prob(state, Side::Row, 1) == expect);
}
