#pragma once

#include "sazig/model.hpp"
#include "sazig/sparse_matrix.hpp"

#include <cstdint>
#include <utility>

namespace sazig {

// Uniform ranges the ground-truth parameters are drawn from.
struct SimRanges {
    std::pair<double, double> vectors{-0.25, 0.25};
    std::pair<double, double> bias_b{0.0, 0.05};
    std::pair<double, double> bias_e{0.1, 0.35};
};

// One named seed per parameter block plus the two sampling streams, so
// individual blocks can be pinned or varied independently.
struct SimSeeds {
    std::uint64_t vectors = 99;
    std::uint64_t vectors_col = 95;  // only used when sides are not tied
    std::uint64_t bias_b = 97;
    std::uint64_t bias_b_col = 96;
    std::uint64_t bias_e = 1;
    std::uint64_t bias_e_col = 2;
    std::uint64_t bernoulli = 1234;
    std::uint64_t gamma = 4321;

    static SimSeeds from_base(std::uint64_t base);
};

struct SimConfig {
    Eigen::Index n = 300;  // square n x n matrix
    Eigen::Index dim = 50;
    double shape = 4.0;
    bool tie_sides = true;  // column vectors copy the row vectors
    SimRanges ranges;
    SimSeeds seeds;
};

struct SimData {
    SparseCountMatrix matrix;
    ModelState truth;
};

// Draws ground-truth parameters, then one Bernoulli-Gamma pair per
// cell under the log link. Throws InvalidMeanError if any cell's mean
// overflows (extreme configurations).
SimData generate(const SimConfig& config);

// Starting points for fits on simulated data: either the truth with
// only the column vectors re-randomized, or every block re-randomized.
enum class InitSetting { TrueExceptColVectors, AllRandom };

struct InitSeeds {
    std::uint64_t vectors = 102;
    std::uint64_t vectors_col = 103;
    std::uint64_t bias_b = 104;
    std::uint64_t bias_b_col = 105;
    std::uint64_t bias_e = 106;
    std::uint64_t bias_e_col = 107;

    static InitSeeds from_base(std::uint64_t base);
};

ModelState make_init(InitSetting setting, const SimData& data, const SimConfig& config,
                     const InitSeeds& seeds = {});

}  // namespace sazig
