#pragma once

#include <stdexcept>
#include <string>

namespace pdsplit {

/// Dimension or block-structure mismatch between operands.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid solver configuration (step size out of bounds, inconsistent beta, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Power iteration (or another estimator) failed to converge; carries the best
/// estimate seen so far.
class EstimationError : public std::runtime_error {
public:
    EstimationError(const std::string& what, double best)
        : std::runtime_error(what), best_estimate(best) {}
    double best_estimate;
};

/// Non-finite intermediate produced by an iteration.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A value (objective, inf-convolution, conjugate) was requested for a
/// function pair that has no closed form and no user-supplied closure.
class UnsupportedEvaluationError : public std::runtime_error {
public:
    explicit UnsupportedEvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/// Every candidate point of a search region was infeasible.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pdsplit
