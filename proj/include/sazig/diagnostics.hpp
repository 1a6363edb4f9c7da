#pragma once

#include "sazig/model.hpp"
#include "sazig/sparse_matrix.hpp"

#include <vector>

namespace sazig {

enum class SeparationFlag { None, SaturationWarning, SuspectedSeparation };

// Window length and saturation threshold for the monitor below.
inline constexpr int kSaturationWindow = 5;
inline constexpr double kSaturationMargin = 1e-6;

const char* separation_flag_name(SeparationFlag flag);

// Flags an index whose largest fitted probability has been strictly
// increasing over the last kSaturationWindow sweeps and has entered the
// saturated zone above 1 - kSaturationMargin. Histories shorter than
// the window never flag.
SeparationFlag saturation_monitor(const std::vector<double>& max_p_history);

// Largest fitted Bernoulli probability along one line; feeds the
// monitor's history.
double line_max_prob(const ModelState& state, Side side, Eigen::Index idx);

// Degree of linear separation of a line's zero/positive pattern in the
// opposing side's augmented vector space (vector, 1). A capped
// perceptron searches for a separating direction; the result is the
// best fraction of correctly-signed points seen, so 1.0 means a
// direction placing every positive cell on one side and every zero on
// the other was found (separated data), values below 1.0 mean the
// search kept finding violations (overlap). Lines whose cells are all
// positive or all zero are trivially separated and return 1.0.
double separation_probe(const SparseCountMatrix& y, const ModelState& state, Side side,
                        Eigen::Index idx);

}  // namespace sazig
