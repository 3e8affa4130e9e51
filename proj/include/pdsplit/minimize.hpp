#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pdsplit/fbf.hpp"
#include "pdsplit/prox.hpp"

// Minimization front-end: poses
//   minimize_x  f(x) + sum_i (g_i [] l_i)(L_i x - r_i) + h(x) - <x, z>
// and its dual
//   minimize_v  (f* [] h*)(z - sum_i L_i^* v_i)
//               + sum_i (g_i*(v_i) + l_i*(v_i) + <v_i, r_i>)
// ([] is infimal convolution), translating the datum into an operator
// ProblemSpec whose recursion coincides with the prox-flavored one.
// l_i enters only through grad l_i*; it is supplied as a SmoothFunction.

namespace pdsplit {

/// Analytic form tag for h and l*: what the objective evaluators can handle
/// in closed form.
enum class SmoothForm { Zero, Quadratic, Custom };

struct MinBlock {
    Space G;
    ProxFunction g;
    SmoothFunction l_star;  // gradient is D_i^{-1}; Lipschitz constant is nu_i
    SmoothForm l_form;
    double l_nu;  // Quadratic: l* = (nu/2)|.|^2, i.e. l = |.|^2/(2 nu)
    std::function<double(const Vector&)> infconv_value;  // optional custom (g [] l)
    LinearOperator L;
    double L_norm;
    Vector r;

    /// l_i = indicator of {0}: the block contributes g_i(L_i x - r_i).
    static MinBlock simple(Space G, ProxFunction g, LinearOperator L, Vector r,
                           double L_norm = 0.0);
    /// l_i = |.|^2 / (2 nu): the block contributes the Moreau envelope of g_i.
    static MinBlock with_quadratic_l(Space G, ProxFunction g, double nu, LinearOperator L,
                                     Vector r, double L_norm = 0.0);
    /// Arbitrary smooth l* with an optional closed-form (g [] l) closure.
    static MinBlock with_custom_l_star(Space G, ProxFunction g, SmoothFunction l_star,
                                       LinearOperator L, Vector r, double L_norm = 0.0,
                                       std::function<double(const Vector&)> infconv = nullptr);
};

struct MinimizationSpec {
    Space H;
    Vector z;
    ProxFunction f;
    SmoothFunction h;
    SmoothForm h_form;
    double h_weight;  // Quadratic: h = (w/2)|x - c|^2
    Vector h_center;
    std::vector<MinBlock> blocks;

    static MinimizationSpec with_zero_h(Space H, Vector z, ProxFunction f,
                                        std::vector<MinBlock> blocks);
    static MinimizationSpec with_quadratic_h(Space H, Vector z, ProxFunction f, double weight,
                                             Vector center, std::vector<MinBlock> blocks);
    static MinimizationSpec with_custom_h(Space H, Vector z, ProxFunction f, SmoothFunction h,
                                          std::vector<MinBlock> blocks);

    int m() const { return static_cast<int>(blocks.size()); }
    void validate() const;
};

/// Operator translation: A = df (prox of f as resolvent), C = grad h,
/// B_i = dg_i with prox of g_i* as the direct inverse resolvent,
/// D_i^{-1} = grad l_i*.
ProblemSpec to_problem_spec(const MinimizationSpec& m);

/// Extended-real primal objective; +inf propagates. Throws
/// UnsupportedEvaluationError if a non-catalog (g, l) pair has no inf-conv
/// closure (the solver itself never needs this value).
double primal_objective(const MinimizationSpec& m, const Vector& x);

/// Extended-real dual objective under the sign convention above (the dual is
/// itself a minimization; primal + dual vanishes at optimality).
double dual_objective(const MinimizationSpec& m, const std::vector<Vector>& v);

struct ObjectiveReport {
    double primal = kPlusInfinity;
    double dual = kPlusInfinity;
    double gap = kPlusInfinity;  // primal + dual when both finite
};

ObjectiveReport objectives(const MinimizationSpec& m, const PrimalDualState& state);

struct ObjectiveSample {
    bool available = false;
    double primal = kPlusInfinity;
    double dual = kPlusInfinity;
    double gap = kPlusInfinity;
};

using MinTraceCallback =
    std::function<void(const TracePoint&, const PrimalDualState&, const ObjectiveSample&)>;

struct MinimizeOptions {
    StoppingRule stop{};
    /// Builds the error injector against the translated spec; none when null.
    std::function<ErrorInjector(const ProblemSpec&)> make_injector;
    /// Builds the initial state; zeros when null.
    std::function<PrimalDualState(const ProblemSpec&)> make_init;
    /// Constant step override; default policy when absent.
    std::optional<double> gamma;
    MinTraceCallback trace;
};

struct MinimizeResult {
    SolveReport report;
    ObjectiveReport objectives;
};

MinimizeResult solve_minimization(const MinimizationSpec& m, const MinimizeOptions& options = {});

}  // namespace pdsplit
