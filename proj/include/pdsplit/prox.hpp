#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "pdsplit/linalg.hpp"
#include "pdsplit/operators.hpp"

// Catalog of closed-form proximity operators and the conjugate-function
// machinery built on the Moreau decomposition.

namespace pdsplit {

inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

/// Extended-real addition: +inf absorbs.
inline double ext_add(double a, double b) {
    if (a == kPlusInfinity || b == kPlusInfinity) return kPlusInfinity;
    return a + b;
}

using ProxFn = std::function<Vector(double, const Vector&)>;
using ValueFn = std::function<double(const Vector&)>;

/// A proper lsc convex function known through its proximity operator
/// (gamma, y) -> prox_{gamma f}(y), optionally with its value, the prox of its
/// conjugate, and the value of its conjugate.
class ProxFunction {
public:
    ProxFunction(Space space, std::string name, ProxFn prox, ValueFn value = nullptr,
                 ProxFn conjugate_prox = nullptr, ValueFn conjugate_value = nullptr);

    Space space() const { return space_; }
    const std::string& name() const { return name_; }

    Vector prox(double gamma, const Vector& y) const;

    bool has_value() const { return static_cast<bool>(value_); }
    double value(const Vector& x) const;

    bool has_conjugate_prox() const { return static_cast<bool>(conjugate_prox_); }
    Vector conjugate_prox(double gamma, const Vector& y) const;

    bool has_conjugate_value() const { return static_cast<bool>(conjugate_value_); }
    double conjugate_value(const Vector& u) const;

private:
    Space space_;
    std::string name_;
    ProxFn prox_;
    ValueFn value_;
    ProxFn conjugate_prox_;
    ValueFn conjugate_value_;
};

/// A convex differentiable function known through its gradient, with a
/// declared Lipschitz constant for the gradient.
class SmoothFunction {
public:
    using GradientFn = std::function<Vector(const Vector&)>;

    SmoothFunction(Space space, std::string name, GradientFn gradient, double lipschitz_constant,
                   ValueFn value = nullptr);

    Space space() const { return space_; }
    const std::string& name() const { return name_; }
    double lipschitz_constant() const { return lipschitz_; }

    Vector gradient(const Vector& x) const;
    bool has_value() const { return static_cast<bool>(value_); }
    double value(const Vector& x) const;

private:
    Space space_;
    std::string name_;
    GradientFn gradient_;
    double lipschitz_;
    ValueFn value_;
};

/// prox_{gamma f*}(y). Delegates to the supplied conjugate prox when the
/// catalog has one; otherwise uses the Moreau decomposition
/// prox_{gamma f*}(y) = y - gamma prox_{f/gamma}(y/gamma).
Vector prox_conjugate(const ProxFunction& f, double gamma, const Vector& y);

/// Max violation of the prox optimality inequality
/// f(p) + <y-p, w-p>/gamma <= f(w) over sampled w, where p = prox_{gamma f}(y).
/// Requires f.value.
double subdifferential_check(const ProxFunction& f, double gamma, const Vector& y,
                             int samples = 100, std::uint64_t seed = 0);

struct GradientCheckReport {
    double max_rel_error = 0.0;
    bool ok = true;  // max_rel_error <= 1e-6 with central differences, step 1e-5
};

/// Central finite differences vs the declared gradient at sampled points.
/// Requires h.value.
GradientCheckReport gradient_check(const SmoothFunction& h, int samples, std::uint64_t seed = 0);

/// View a ProxFunction as the resolvent of its subdifferential. The conjugate
/// prox, when present, is installed as the directly supplied inverse
/// resolvent (J_{gamma (df)^{-1}} = prox_{gamma f*}).
ResolventOperator to_resolvent(const ProxFunction& f);

// ----- catalog --------------------------------------------------------------

ProxFunction zero_function(Space s);
ProxFunction linear_function(Space s, Vector a);                    // <., a>
ProxFunction diagonal_quadratic(Space s, Vector m_diag, Vector b);  // 0.5 |M x - b|^2
ProxFunction l1_norm(Space s, double weight = 1.0);
ProxFunction euclidean_norm(Space s, double weight = 1.0);
ProxFunction box_indicator(Space s, Vector lo, Vector hi);
ProxFunction ball_indicator(Space s, Vector center, double radius);
ProxFunction hyperplane_indicator(Space s, Vector a, double b);  // {x : <a,x> = b}
ProxFunction nonnegative_indicator(Space s);
ProxFunction zero_point_indicator(Space s);  // indicator of {0}
ProxFunction huber_function(Space s, double delta);

SmoothFunction zero_smooth(Space s);
SmoothFunction linear_smooth(Space s, Vector a);
SmoothFunction quadratic_smooth(Space s, double weight, Vector center);  // (w/2)|x-c|^2
SmoothFunction diagonal_quadratic_smooth(Space s, Vector m_diag, Vector b);
SmoothFunction huber_smooth(Space s, double delta);

/// All catalog prox functions on the given space (fixed shapes), used by the
/// property suites.
std::vector<ProxFunction> catalog_for_space(Space s);

}  // namespace pdsplit
