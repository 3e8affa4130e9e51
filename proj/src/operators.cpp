#include "pdsplit/operators.hpp"

#include <cmath>
#include <utility>

namespace pdsplit {

ResolventOperator::ResolventOperator(Space space, ResolventFn resolvent,
                                     ResolventFn inverse_resolvent)
    : space_(space), resolvent_(std::move(resolvent)),
      inverse_resolvent_(std::move(inverse_resolvent)) {
    if (!resolvent_) throw ConfigError("ResolventOperator: missing resolvent closure");
}

Vector ResolventOperator::resolvent(double gamma, const Vector& y) const {
    if (gamma <= 0.0) throw ConfigError("resolvent: gamma must be positive");
    if (y.space() != space_) throw ShapeError("resolvent: space mismatch");
    return resolvent_(gamma, y);
}

Vector ResolventOperator::inverse_resolvent(double gamma, const Vector& y) const {
    if (inverse_resolvent_) {
        if (gamma <= 0.0) throw ConfigError("inverse_resolvent: gamma must be positive");
        if (y.space() != space_) throw ShapeError("inverse_resolvent: space mismatch");
        return inverse_resolvent_(gamma, y);
    }
    return resolvent_of_inverse(*this, gamma, y);
}

LipschitzOperator::LipschitzOperator(Space space, Apply apply, double lipschitz_constant)
    : space_(space), apply_(std::move(apply)), lipschitz_(lipschitz_constant) {
    if (!apply_) throw ConfigError("LipschitzOperator: missing apply closure");
    if (!(lipschitz_ >= 0.0)) throw ConfigError("LipschitzOperator: negative Lipschitz constant");
}

Vector LipschitzOperator::apply(const Vector& x) const {
    if (x.space() != space_) throw ShapeError("LipschitzOperator::apply: space mismatch");
    return apply_(x);
}

Vector resolvent_of_inverse(const ResolventOperator& B, double gamma, const Vector& y) {
    if (gamma <= 0.0) throw ConfigError("resolvent_of_inverse: gamma must be positive");
    Vector inner_arg = (1.0 / gamma) * y;
    Vector j = B.resolvent(1.0 / gamma, inner_arg);
    return y - gamma * j;
}

Vector yosida(const ResolventOperator& B, double rho, const Vector& y) {
    if (rho <= 0.0) throw ConfigError("yosida: rho must be positive");
    return (1.0 / rho) * (y - B.resolvent(rho, y));
}

ParallelSumPair parallel_sum_resolvent_pair(ResolventOperator B, LipschitzOperator D_inv) {
    if (B.space() != D_inv.space()) {
        throw ShapeError("parallel_sum_resolvent_pair: operators live on different spaces");
    }
    return ParallelSumPair{std::move(B), std::move(D_inv)};
}

MonotonicityReport check_monotone(const LipschitzOperator& T, int samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("check_monotone: samples must be >= 1");
    Rng rng(seed);
    MonotonicityReport rep;
    rep.samples = samples;
    rep.min_inner = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        Vector x = normal_vector(rng, T.space());
        Vector y = normal_vector(rng, T.space());
        Vector dx = x - y;
        double dn = norm(dx);
        if (dn < 1e-12) continue;
        Vector dt = T.apply(x) - T.apply(y);
        rep.min_inner = std::min(rep.min_inner, inner(dx, dt));
        rep.max_ratio = std::max(rep.max_ratio, norm(dt) / dn);
    }
    if (!std::isfinite(rep.min_inner)) rep.min_inner = 0.0;
    rep.monotone_ok = rep.min_inner >= -1e-9;
    rep.lipschitz_ok = rep.max_ratio <= T.lipschitz_constant() + 1e-9;
    return rep;
}

double firm_nonexpansiveness_defect(const ResolventOperator& B, int samples, std::uint64_t seed) {
    Rng rng(seed);
    const double gammas[] = {0.1, 1.0, 10.0};
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        Vector y = normal_vector(rng, B.space());
        Vector yp = normal_vector(rng, B.space());
        for (double g : gammas) {
            Vector d = B.resolvent(g, y) - B.resolvent(g, yp);
            double lhs = inner(d, d);
            double rhs = inner(y - yp, d);
            worst = std::max(worst, lhs - rhs);
        }
    }
    return worst;
}

ResolventOperator zero_map_operator(Space s) {
    return ResolventOperator(s, [](double, const Vector& y) { return y; });
}

ResolventOperator identity_map_operator(Space s) {
    return ResolventOperator(s, [](double gamma, const Vector& y) {
        return (1.0 / (1.0 + gamma)) * y;
    });
}

LipschitzOperator zero_lipschitz(Space s) {
    return LipschitzOperator(s, [s](const Vector&) { return Vector(s); }, 0.0);
}

LipschitzOperator scaled_identity_lipschitz(Space s, double a) {
    if (a < 0.0) throw ConfigError("scaled_identity_lipschitz: factor must be >= 0");
    return LipschitzOperator(s, [a](const Vector& x) { return a * x; }, a);
}

}  // namespace pdsplit
