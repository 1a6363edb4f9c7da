#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace sazig {

// Raised when a link function produces a mean outside (0, inf) at an
// observed cell: canonical link with tau >= 0, or exp(tau) that leaves
// the representable range. Carries the offending cell so callers can
// report it or trigger step-halving.
class InvalidMeanError : public std::runtime_error {
public:
    InvalidMeanError(Eigen::Index row, Eigen::Index col, const std::string& what)
        : std::runtime_error(what), row_(row), col_(col) {}
    Eigen::Index row() const { return row_; }
    Eigen::Index col() const { return col_; }

private:
    Eigen::Index row_;
    Eigen::Index col_;
};

// Information matrix could not be factorized even after ridge escalation.
class SingularInformationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every index update in a sweep was rejected; continuing would spin.
class TrainingAbortedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure (missing file, unwritable path, bad format).
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sazig
