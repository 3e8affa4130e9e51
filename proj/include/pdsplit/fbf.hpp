#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pdsplit/linalg.hpp"
#include "pdsplit/operators.hpp"

// Core solver: error-tolerant primal-dual forward-backward-forward iteration
// on the product space K = H (+) G_1 (+) ... (+) G_m, in both its expanded
// block form and its compact product-space form.

namespace pdsplit {

/// One coupled block: the pair (B_i, D_i^{-1}) of the parallel sum, the
/// coupling operator L_i with a norm estimate, and the offset r_i.
struct Block {
    Space G;
    ResolventOperator B;
    LipschitzOperator D_inv;  // nu_i = D_inv.lipschitz_constant()
    LinearOperator L;
    double L_norm;  // estimate of |L_i|, must be > 0
    Vector r;
};

struct ProblemSpec {
    Space H;
    Vector z;
    ResolventOperator A;
    LipschitzOperator C;  // mu = C.lipschitz_constant()
    std::vector<Block> blocks;

    int m() const { return static_cast<int>(blocks.size()); }
    void validate() const;
};

/// beta = max{mu, nu_1, ..., nu_m} + sqrt(sum_i |L_i|^2)
double compute_beta(const ProblemSpec& spec);

/// Step-size policy: gamma_n must stay in [epsilon, (1-epsilon)/beta].
struct StepPolicy {
    double beta;
    double epsilon;
    std::function<double(long)> gamma;

    double gamma_min() const { return epsilon; }
    double gamma_max() const { return (1.0 - epsilon) / beta; }

    /// Constant maximal step (1-eps)/beta with eps = min(1e-6, 0.5/(beta+1)).
    static StepPolicy default_for(const ProblemSpec& spec);
    static StepPolicy default_for_beta(double beta);
    /// Constant user-chosen step; validated against the admissible interval.
    static StepPolicy constant(double beta, double gamma_value);
};

/// The absolutely summable error sequences of the iteration. Defaults to
/// exact evaluations (all zero).
struct ErrorInjector {
    using Seq = std::function<Vector(long)>;
    Seq a1, b1, c1;                  // sequences in H
    std::vector<Seq> a2, b2, c2;     // per-block sequences in G_i
    bool declared_summable = true;   // true for the built-in generators

    static ErrorInjector none(const ProblemSpec& spec);
    /// |e_n| = magnitude/(n+1)^2 along a fixed seeded direction, all slots.
    static ErrorInjector decay(const ProblemSpec& spec, double magnitude, std::uint64_t seed);
    /// Single perturbation of b_1 at n = 0; all other terms zero.
    static ErrorInjector spike(const ProblemSpec& spec, double magnitude, std::uint64_t seed);
};

/// The injector evaluated at one iteration index.
struct IterationErrors {
    Vector a1, b1, c1;
    std::vector<Vector> a2, b2, c2;

    static IterationErrors zero(const ProblemSpec& spec);
};

IterationErrors sample_errors(const ErrorInjector& inj, const ProblemSpec& spec, long n);

struct PrimalDualState {
    Vector x;
    std::vector<Vector> v;
    long n = 0;

    static PrimalDualState zeros(const ProblemSpec& spec);
};

/// Intermediates of one iteration (paper indices: y1, p1, q1 and per block
/// y2_i, p2_i, q2_i).
struct IterationWorkspace {
    Vector y1, p1, q1;
    std::vector<Vector> y2, p2, q2;
};

/// Operator-evaluation counters for the iteration path. The FBF signature is
/// two forward evaluations of every single-valued operator and one resolvent
/// of every set-valued operator per iteration.
struct EvalCounts {
    long resolvent_A = 0;
    long forward_C = 0;
    std::vector<long> resolvent_B;  // J_{gamma B_i^{-1}} applications
    std::vector<long> forward_D;    // D_i^{-1} applications
    std::vector<long> forward_L;    // L_i applications
    std::vector<long> adjoint_L;    // L_i^* applications

    static EvalCounts zeros(const ProblemSpec& spec);
};

struct StepResult {
    PrimalDualState state;
    IterationWorkspace work;
};

/// One iteration of the expanded recursion. Throws DivergenceError if a
/// non-finite intermediate appears.
StepResult fbf_step(const ProblemSpec& spec, const PrimalDualState& state, double gamma,
                    const IterationErrors& errors, EvalCounts* counts = nullptr);

// ----- product-space form (differential-testing path) -----------------------

/// Resolvent of the block-diagonal set-valued operator M:
/// J_{gamma M}(x, v_1..v_m) = (J_{gamma A}(x + gamma z),
///                             J_{gamma B_i^{-1}}(v_i - gamma r_i), ...).
struct ProductResolvent {
    std::function<BlockVector(double, const BlockVector&)> apply;
};

/// The single-valued skew-plus-monotone operator Q:
/// Q(x, v_1..v_m) = (Cx + sum_i L_i^* v_i, -L_1 x + D_1^{-1} v_1, ...).
struct ProductOperator {
    std::function<BlockVector(const BlockVector&)> apply;
    double lipschitz_constant;
};

ProductResolvent assemble_M(const ProblemSpec& spec);
ProductOperator assemble_Q(const ProblemSpec& spec);

BlockVector pack_state(const PrimalDualState& state);
PrimalDualState unpack_state(const BlockVector& k, long n);

/// Stack the expanded-form error terms into product-space form. The dual
/// components of a and c enter the compact recursion with opposite sign
/// (the compact form subtracts gamma*(Q+a) in every block, while the expanded
/// recursion adds the dual-block forward terms).
struct ProductErrors {
    BlockVector a, b, c;
};

ProductErrors pack_errors(const IterationErrors& errors);

/// Compact step: y = x - gamma(Qx + a); p = J_{gamma M} y + b;
/// q = p - gamma(Qp + c); next = x - y + q.
BlockVector fbf_step_product(const ProductResolvent& M, const ProductOperator& Q,
                             const BlockVector& x, double gamma, const ProductErrors& errors);
BlockVector fbf_step_product(const ProductResolvent& M, const ProductOperator& Q,
                             const BlockVector& x, double gamma);

// ----- driver ----------------------------------------------------------------

struct StoppingRule {
    double tol = 1e-8;
    long max_iter = 100000;
};

enum class Termination { ResidualTolerance, MaxIterations, Diverged };

const char* termination_name(Termination t);

struct TracePoint {
    long n;
    double gamma;
    double primal_res;               // |x_n - p1_n|
    std::vector<double> dual_res;    // |v_in - p2_in| per block
    double kkt;
};

using TraceCallback = std::function<void(const TracePoint&, const PrimalDualState&)>;

struct SolveReport {
    PrimalDualState final;
    std::vector<TracePoint> residual_history;
    Termination termination = Termination::MaxIterations;
    long iterations = 0;
    EvalCounts eval_counts;
};

/// Iterates fbf_step until max(primal_res, max_i dual_res_i) <=
/// tol*(1 + |x_n|), the iteration cap, or the 1e12 divergence guard.
SolveReport solve(const ProblemSpec& spec, const StepPolicy& policy, const ErrorInjector& injector,
                  PrimalDualState init, const StoppingRule& stop,
                  const TraceCallback& trace = nullptr);

/// Fixed-point defect of the resolvent characterization of the primal-dual
/// inclusions; zero exactly at solutions, for every gamma_check > 0.
double kkt_residual(const ProblemSpec& spec, const PrimalDualState& state,
                    double gamma_check = 1.0);

/// The same residuals reported inclusion-by-inclusion, as a certificate for
/// the dual problem.
struct DualCertificate {
    double primal_inclusion_residual;
    std::vector<double> block_residuals;
    double max_residual;
};

DualCertificate dual_solution_certificate(const ProblemSpec& spec, const PrimalDualState& state,
                                          double gamma_check = 1.0);

}  // namespace pdsplit
