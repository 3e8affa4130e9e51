#pragma once

#include <functional>

#include "pdsplit/linalg.hpp"

// Independent reference solvers used to produce ground truth at desk scale.
// Nothing here touches the splitting solver or the prox catalog; these paths
// must stay independent of the code they check.

namespace pdsplit::oracle {

/// Exact minimizer of lambda |x|_1 + 0.5 |x - z|^2: componentwise
/// sign(z_j) max(|z_j| - lambda, 0).
Vector soft_threshold(const Vector& z, double lambda);

struct GridBox {
    Vector lo;
    Vector hi;
};

/// Exhaustive grid argmin over the box followed by one golden-section
/// refinement pass per axis. Dimension <= 3 and resolution <= 401.
/// Throws InfeasibleError if the objective is +inf on every grid point.
Vector grid_minimize(const std::function<double(const Vector&)>& objective, const GridBox& box,
                     int resolution);

struct SubgradientProblem {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> subgradient;
    /// Optional projection onto the feasible set (projected variant if set).
    std::function<Vector(const Vector&)> projection;
};

/// Diminishing-step (c/sqrt(n)) subgradient descent with best-iterate
/// tracking, c = 1. A crude cross-check, good to roughly 1e-3.
Vector subgradient_minimize(const SubgradientProblem& problem, const Vector& x0, long iterations);

}  // namespace pdsplit::oracle
