#include "sazig/simulate.hpp"

#include "sazig/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace sazig {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

void draw_block(Eigen::Ref<Eigen::MatrixXd> m, std::uint64_t seed,
                std::pair<double, double> range) {
    auto eng = seeded_engine(seed);
    std::uniform_real_distribution<double> dist(range.first, range.second);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            m(i, k) = dist(eng);
        }
    }
}

}  // namespace

SimSeeds SimSeeds::from_base(std::uint64_t base) {
    SimSeeds s;
    s.vectors = base + 1;
    s.vectors_col = base + 2;
    s.bias_b = base + 3;
    s.bias_b_col = base + 4;
    s.bias_e = base + 5;
    s.bias_e_col = base + 6;
    s.bernoulli = base + 7;
    s.gamma = base + 8;
    return s;
}

InitSeeds InitSeeds::from_base(std::uint64_t base) {
    InitSeeds s;
    s.vectors = base + 21;
    s.vectors_col = base + 22;
    s.bias_b = base + 23;
    s.bias_b_col = base + 24;
    s.bias_e = base + 25;
    s.bias_e_col = base + 26;
    return s;
}

SimData generate(const SimConfig& config) {
    if (config.n <= 0 || config.dim < 0) {
        throw std::invalid_argument("simulate: bad dimensions");
    }
    if (!(config.shape > 0.0) || !std::isfinite(config.shape)) {
        throw std::invalid_argument("simulate: shape must be positive and finite");
    }

    ModelState truth;
    truth.link = Link::Log;
    truth.shape = config.shape;
    truth.rows = SideParams::zeros(config.n, config.dim);
    truth.cols = SideParams::zeros(config.n, config.dim);
    draw_block(truth.rows.vectors, config.seeds.vectors, config.ranges.vectors);
    if (config.tie_sides) {
        truth.cols.vectors = truth.rows.vectors;
    } else {
        draw_block(truth.cols.vectors, config.seeds.vectors_col, config.ranges.vectors);
    }
    draw_block(truth.rows.bias_b, config.seeds.bias_b, config.ranges.bias_b);
    draw_block(truth.cols.bias_b, config.seeds.bias_b_col, config.ranges.bias_b);
    draw_block(truth.rows.bias_e, config.seeds.bias_e, config.ranges.bias_e);
    draw_block(truth.cols.bias_e, config.seeds.bias_e_col, config.ranges.bias_e);

    auto bern_eng = seeded_engine(config.seeds.bernoulli);
    auto gamma_eng = seeded_engine(config.seeds.gamma);
    std::vector<SparseCountMatrix::Triple> triples;
    for (Eigen::Index i = 0; i < config.n; ++i) {
        for (Eigen::Index j = 0; j < config.n; ++j) {
            const double p = prob(eta(truth.rows, i, truth.cols, j));
            const double t = tau(truth.rows, i, truth.cols, j);
            const double mu = std::exp(t);
            if (!std::isfinite(mu)) {
                std::ostringstream msg;
                msg << "simulate: mean overflow at cell (" << i << ", " << j << ")";
                throw InvalidMeanError(i, j, msg.str());
            }
            if (std::bernoulli_distribution(p)(bern_eng)) {
                std::gamma_distribution<double> g(config.shape, mu / config.shape);
                const double y = g(gamma_eng);
                if (y > 0.0) {
                    triples.push_back({i, j, y});
                }
            }
        }
    }
    SimData out{SparseCountMatrix::from_triples(triples, config.n, config.n),
                std::move(truth)};
    return out;
}

ModelState make_init(InitSetting setting, const SimData& data, const SimConfig& config,
                     const InitSeeds& seeds) {
    ModelState init = data.truth;
    init.iteration = 0;
    if (setting == InitSetting::TrueExceptColVectors) {
        draw_block(init.cols.vectors, seeds.vectors_col, config.ranges.vectors);
        return init;
    }
    draw_block(init.rows.vectors, seeds.vectors, config.ranges.vectors);
    draw_block(init.cols.vectors, seeds.vectors_col, config.ranges.vectors);
    draw_block(init.rows.bias_b, seeds.bias_b, config.ranges.bias_b);
    draw_block(init.cols.bias_b, seeds.bias_b_col, config.ranges.bias_b);
    draw_block(init.rows.bias_e, seeds.bias_e, config.ranges.bias_e);
    draw_block(init.cols.bias_e, seeds.bias_e_col, config.ranges.bias_e);
    return init;
}

}  // namespace sazig
