#include "pdsplit/oracle.hpp"

#include <cmath>
#include <limits>

namespace pdsplit::oracle {

Vector soft_threshold(const Vector& z, double lambda) {
    if (lambda <= 0.0) throw ConfigError("soft_threshold: lambda must be positive");
    Vector x(z.space());
    for (std::size_t j = 0; j < z.size(); ++j) {
        double s = (z[j] > 0.0) - (z[j] < 0.0);
        x[j] = s * std::max(std::abs(z[j]) - lambda, 0.0);
    }
    return x;
}

namespace {

// Golden-section line search along axis `axis` on [a, b].
double golden_axis(const std::function<double(const Vector&)>& objective, Vector x, int axis,
                   double a, double b) {
    const double invphi = 0.6180339887498948482;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    auto eval = [&](double t) {
        x[axis] = t;
        return objective(x);
    };
    double fc = eval(c);
    double fd = eval(d);
    for (int it = 0; it < 60; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = eval(d);
        }
    }
    double mid = 0.5 * (a + b);
    return std::isfinite(eval(mid)) ? mid : (fc < fd ? c : d);
}

}  // namespace

Vector grid_minimize(const std::function<double(const Vector&)>& objective, const GridBox& box,
                     int resolution) {
    const int dim = box.lo.dim();
    if (box.lo.space() != box.hi.space()) throw ShapeError("grid_minimize: box space mismatch");
    if (dim > 3) throw ConfigError("grid_minimize: dimension must be <= 3");
    if (resolution < 2 || resolution > 401) {
        throw ConfigError("grid_minimize: resolution must be in [2, 401]");
    }
    for (int i = 0; i < dim; ++i) {
        if (!(box.lo[i] < box.hi[i])) throw ConfigError("grid_minimize: empty box axis");
    }

    long total = 1;
    for (int i = 0; i < dim; ++i) total *= resolution;

    Vector best(box.lo.space());
    double fbest = std::numeric_limits<double>::infinity();
    Vector x(box.lo.space());
    for (long cell = 0; cell < total; ++cell) {
        long rem = cell;
        for (int i = 0; i < dim; ++i) {
            long idx = rem % resolution;
            rem /= resolution;
            x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(idx) /
                                   static_cast<double>(resolution - 1);
        }
        double f = objective(x);
        if (f < fbest) {
            fbest = f;
            best = x;
        }
    }
    if (!std::isfinite(fbest)) {
        throw InfeasibleError("grid_minimize: objective is +inf on the whole grid");
    }

    // One refinement pass: golden-section per axis around the grid winner.
    for (int i = 0; i < dim; ++i) {
        double h = (box.hi[i] - box.lo[i]) / static_cast<double>(resolution - 1);
        double a = std::max(box.lo[i], best[i] - h);
        double b = std::min(box.hi[i], best[i] + h);
        double t = golden_axis(objective, best, i, a, b);
        Vector cand = best;
        cand[i] = t;
        double f = objective(cand);
        if (f <= fbest) {
            fbest = f;
            best = cand;
        }
    }
    return best;
}

Vector subgradient_minimize(const SubgradientProblem& problem, const Vector& x0, long iterations) {
    if (!problem.value || !problem.subgradient) {
        throw ConfigError("subgradient_minimize: value and subgradient closures are required");
    }
    const double c = 1.0;
    Vector x = problem.projection ? problem.projection(x0) : x0;
    Vector best = x;
    double fbest = problem.value(x);
    for (long n = 1; n <= iterations; ++n) {
        Vector g = problem.subgradient(x);
        axpy_inplace(-c / std::sqrt(static_cast<double>(n)), g, x);
        if (problem.projection) x = problem.projection(x);
        double f = problem.value(x);
        if (f < fbest) {
            fbest = f;
            best = x;
        }
    }
    return best;
}

}  // namespace pdsplit::oracle
