#pragma once

#include "sazig/model.hpp"
#include "sazig/sparse_matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sazig {

// Step scaling across outer iterations: None applies full Fisher steps,
// PowerQuarter scales them by lr / t^(1/4).
enum class LrSchedule { None, PowerQuarter };

// Square problems interleave row and column updates within one sweep;
// RowsThenCols always finishes the row side first. Rectangular
// problems sweep rows then columns regardless.
enum class SweepOrder { Interleaved, RowsThenCols };

// Gamma shape handling: Fixed uses FitConfig::shape as-is,
// EstimateOnce estimates it from the data before the first sweep and
// then keeps it fixed.
enum class ShapeMode { EstimateOnce, Fixed };

struct FitConfig {
    Link link = Link::Log;
    int max_iterations = 100;
    int inner_epochs = 20;
    double lr = 0.5;
    LrSchedule lr_schedule = LrSchedule::PowerQuarter;
    double epsilon = 1e-6;
    double ridge_scale = 1e-8;
    ShapeMode shape_mode = ShapeMode::EstimateOnce;
    double shape = 1.0;
    SweepOrder sweep_order = SweepOrder::Interleaved;
    int max_halvings = 30;
    int threads = 1;

    void validate() const;
};

struct IterationRecord {
    long iter = 0;
    double loss = 0.0;
    double u_theta_norm = 0.0;   // stacked row-side score norm
    double u_thetat_norm = 0.0;  // stacked column-side score norm
    long halvings = 0;
    std::vector<std::string> warnings;
};

struct FitTrace {
    std::vector<IterationRecord> records;
};

// CSV with one line per completed outer iteration; %.17g values,
// warnings joined with ';'.
void save_trace(const FitTrace& trace, const std::string& path);

// Uniform random initialization. Vector entries span
// +-0.5 / (count * dim), Bernoulli biases +-0.1, Gamma biases
// (0.1, 0.6) under the log link and its negation under the canonical
// link so the initial natural parameters are valid.
struct InitSpec {
    Eigen::Index dim = 20;
    std::uint64_t seed = 0;
};

ModelState random_init(Eigen::Index n_rows, Eigen::Index n_cols, const InitSpec& spec,
                       Link link, double shape);

// Multiplier applied to the Fisher step at outer iteration t (1-based).
double lr_factor(const FitConfig& config, long t);

struct UpdateResult {
    long halvings = 0;
    bool skipped = false;  // no step was accepted; parameters unchanged
    std::vector<std::string> warnings;
};

// One index update at outer iteration t: inner_epochs scoring steps
// plus the closing one, each damped by lr_factor and validated against
// the index's own likelihood. Steps producing an invalid mean or a
// non-finite likelihood are halved up to max_halvings times, then
// rejected.
UpdateResult update_index(const SparseCountMatrix& y, ModelState& state, Side side,
                          Eigen::Index idx, long t, const FitConfig& config);

struct FitResult {
    ModelState state;
    FitTrace trace;
};

// Alternating fit. Stops when the relative loss change drops below
// config.epsilon or after max_iterations sweeps; an infinite epsilon
// stops after the first sweep. Throws TrainingAbortedError if an
// entire sweep rejects every index.
FitResult fit(const SparseCountMatrix& y, const FitConfig& config, const ModelState& init);
FitResult fit(const SparseCountMatrix& y, const FitConfig& config, const InitSpec& init);

}  // namespace sazig
