#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>

namespace sazig {

enum class Link { Canonical, Log };
enum class Side { Row, Col };

// Latent parameters for one side of the factorization: a length-d
// vector per index plus two scalar biases, one entering the Bernoulli
// linear predictor (b) and one the Gamma linear predictor (e).
struct SideParams {
    Eigen::MatrixXd vectors;  // count x dim
    Eigen::VectorXd bias_b;
    Eigen::VectorXd bias_e;

    Eigen::Index count() const { return vectors.rows(); }
    Eigen::Index dim() const { return vectors.cols(); }

    static SideParams zeros(Eigen::Index count, Eigen::Index dim);
};

// Full model: both sides share the latent vectors across the Bernoulli
// and Gamma parts, plus the global Gamma shape.
struct ModelState {
    SideParams rows;
    SideParams cols;
    Link link = Link::Log;
    double shape = 1.0;
    long iteration = 0;

    // Throws std::invalid_argument on dimension mismatches, non-finite
    // parameters, or non-positive shape.
    void validate() const;
};

// Bernoulli linear predictor for cell (i, j).
double eta(const SideParams& rows, Eigen::Index i, const SideParams& cols, Eigen::Index j);

// Gamma linear predictor for cell (i, j).
double tau(const SideParams& rows, Eigen::Index i, const SideParams& cols, Eigen::Index j);

// Stable logistic; saturates cleanly to 0/1 for very large |eta|.
double prob(double eta);

// Gamma mean implied by tau under the given link, or nullopt when tau
// falls outside the link's valid region (canonical needs tau < 0; log
// overflows past ~709 and underflows to zero far below).
std::optional<double> mean_from_tau(Link link, double tau);

const char* link_name(Link link);
std::optional<Link> parse_link(const std::string& name);

// Checkpoint I/O. Plain text, versioned header, %.17g values so a
// save/load cycle reproduces the state bit-for-bit.
void save_model(const ModelState& state, const std::string& path);
ModelState load_model(const std::string& path);

}  // namespace sazig
