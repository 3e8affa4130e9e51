#include "pdsplit/fbf.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace pdsplit {

namespace {

constexpr double kDivergenceGuard = 1e12;

void check_finite(const Vector& v, const char* what, long n) {
    if (!all_finite(v)) {
        throw DivergenceError(std::string("non-finite ") + what + " at iteration " +
                              std::to_string(n));
    }
}

ErrorInjector::Seq zero_seq(Space s) {
    return [s](long) { return Vector(s); };
}

}  // namespace

void ProblemSpec::validate() const {
    if (blocks.empty()) throw ConfigError("ProblemSpec: at least one block is required");
    if (z.space() != H) throw ShapeError("ProblemSpec: z not in H");
    if (A.space() != H) throw ShapeError("ProblemSpec: A not on H");
    if (C.space() != H) throw ShapeError("ProblemSpec: C not on H");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& blk = blocks[i];
        const std::string tag = "ProblemSpec block " + std::to_string(i);
        if (blk.B.space() != blk.G) throw ShapeError(tag + ": B not on G");
        if (blk.D_inv.space() != blk.G) throw ShapeError(tag + ": D_inv not on G");
        if (blk.r.space() != blk.G) throw ShapeError(tag + ": r not in G");
        if (blk.L.domain() != H) throw ShapeError(tag + ": L domain is not H");
        if (blk.L.codomain() != blk.G) throw ShapeError(tag + ": L codomain is not G");
        if (!(blk.L_norm > 0.0)) {
            throw ConfigError(tag + ": missing or non-positive norm estimate for L");
        }
    }
}

double compute_beta(const ProblemSpec& spec) {
    spec.validate();
    double mx = spec.C.lipschitz_constant();
    double sq = 0.0;
    for (const Block& blk : spec.blocks) {
        mx = std::max(mx, blk.D_inv.lipschitz_constant());
        sq += blk.L_norm * blk.L_norm;
    }
    return mx + std::sqrt(sq);
}

StepPolicy StepPolicy::default_for_beta(double beta) {
    if (!(beta > 0.0)) throw ConfigError("StepPolicy: beta must be positive");
    double eps = std::min(1e-6, 0.5 / (beta + 1.0));
    double g = (1.0 - eps) / beta;
    return StepPolicy{beta, eps, [g](long) { return g; }};
}

StepPolicy StepPolicy::default_for(const ProblemSpec& spec) {
    return default_for_beta(compute_beta(spec));
}

StepPolicy StepPolicy::constant(double beta, double gamma_value) {
    StepPolicy p = default_for_beta(beta);
    if (gamma_value < p.gamma_min() || gamma_value > p.gamma_max()) {
        throw ConfigError("StepPolicy::constant: gamma " + std::to_string(gamma_value) +
                          " outside [" + std::to_string(p.gamma_min()) + ", " +
                          std::to_string(p.gamma_max()) + "]");
    }
    p.gamma = [gamma_value](long) { return gamma_value; };
    return p;
}

ErrorInjector ErrorInjector::none(const ProblemSpec& spec) {
    ErrorInjector inj;
    inj.a1 = zero_seq(spec.H);
    inj.b1 = zero_seq(spec.H);
    inj.c1 = zero_seq(spec.H);
    for (const Block& blk : spec.blocks) {
        inj.a2.push_back(zero_seq(blk.G));
        inj.b2.push_back(zero_seq(blk.G));
        inj.c2.push_back(zero_seq(blk.G));
    }
    return inj;
}

ErrorInjector ErrorInjector::decay(const ProblemSpec& spec, double magnitude, std::uint64_t seed) {
    Rng rng(seed);
    auto decay_seq = [&rng, magnitude](Space s) -> Seq {
        Vector dir = unit_vector(rng, s);
        return [dir, magnitude](long n) {
            double scale = magnitude / (static_cast<double>(n + 1) * static_cast<double>(n + 1));
            return scale * dir;
        };
    };
    ErrorInjector inj;
    inj.a1 = decay_seq(spec.H);
    inj.b1 = decay_seq(spec.H);
    inj.c1 = decay_seq(spec.H);
    for (const Block& blk : spec.blocks) {
        inj.a2.push_back(decay_seq(blk.G));
        inj.b2.push_back(decay_seq(blk.G));
        inj.c2.push_back(decay_seq(blk.G));
    }
    return inj;
}

ErrorInjector ErrorInjector::spike(const ProblemSpec& spec, double magnitude, std::uint64_t seed) {
    Rng rng(seed);
    Vector dir = unit_vector(rng, spec.H);
    ErrorInjector inj = none(spec);
    inj.b1 = [dir, magnitude, H = spec.H](long n) {
        return n == 0 ? magnitude * dir : Vector(H);
    };
    return inj;
}

IterationErrors IterationErrors::zero(const ProblemSpec& spec) {
    IterationErrors e{Vector(spec.H), Vector(spec.H), Vector(spec.H), {}, {}, {}};
    for (const Block& blk : spec.blocks) {
        e.a2.emplace_back(blk.G);
        e.b2.emplace_back(blk.G);
        e.c2.emplace_back(blk.G);
    }
    return e;
}

IterationErrors sample_errors(const ErrorInjector& inj, const ProblemSpec& spec, long n) {
    IterationErrors e = IterationErrors::zero(spec);
    if (inj.a1) e.a1 = inj.a1(n);
    if (inj.b1) e.b1 = inj.b1(n);
    if (inj.c1) e.c1 = inj.c1(n);
    for (int i = 0; i < spec.m(); ++i) {
        if (i < static_cast<int>(inj.a2.size()) && inj.a2[i]) e.a2[i] = inj.a2[i](n);
        if (i < static_cast<int>(inj.b2.size()) && inj.b2[i]) e.b2[i] = inj.b2[i](n);
        if (i < static_cast<int>(inj.c2.size()) && inj.c2[i]) e.c2[i] = inj.c2[i](n);
    }
    return e;
}

PrimalDualState PrimalDualState::zeros(const ProblemSpec& spec) {
    PrimalDualState st{Vector(spec.H), {}, 0};
    for (const Block& blk : spec.blocks) st.v.emplace_back(blk.G);
    return st;
}

EvalCounts EvalCounts::zeros(const ProblemSpec& spec) {
    EvalCounts c;
    c.resolvent_B.assign(spec.blocks.size(), 0);
    c.forward_D.assign(spec.blocks.size(), 0);
    c.forward_L.assign(spec.blocks.size(), 0);
    c.adjoint_L.assign(spec.blocks.size(), 0);
    return c;
}

StepResult fbf_step(const ProblemSpec& spec, const PrimalDualState& state, double gamma,
                    const IterationErrors& errors, EvalCounts* counts) {
    if (gamma <= 0.0) throw ConfigError("fbf_step: gamma must be positive");
    const long n = state.n;
    const int m = spec.m();

    // y1 = x - gamma (Cx + sum_i L_i^* v_i + a1)
    Vector u = spec.C.apply(state.x);
    if (counts) ++counts->forward_C;
    for (int i = 0; i < m; ++i) {
        u += spec.blocks[i].L.apply_adjoint(state.v[i]);
        if (counts) ++counts->adjoint_L[i];
    }
    u += errors.a1;
    Vector y1 = state.x;
    axpy_inplace(-gamma, u, y1);
    check_finite(y1, "y1", n);

    // p1 = J_{gamma A}(y1 + gamma z) + b1
    Vector arg1 = y1;
    axpy_inplace(gamma, spec.z, arg1);
    Vector p1 = spec.A.resolvent(gamma, arg1);
    if (counts) ++counts->resolvent_A;
    p1 += errors.b1;
    check_finite(p1, "p1", n);

    IterationWorkspace work{y1, p1, Vector(spec.H), {}, {}, {}};
    PrimalDualState next{Vector(spec.H), {}, n + 1};

    for (int i = 0; i < m; ++i) {
        const Block& blk = spec.blocks[i];
        // y2_i = v_i + gamma (L_i x - D_i^{-1} v_i + a2_i)
        Vector t = blk.L.apply(state.x);
        t -= blk.D_inv.apply(state.v[i]);
        t += errors.a2[i];
        if (counts) {
            ++counts->forward_L[i];
            ++counts->forward_D[i];
        }
        Vector y2 = state.v[i];
        axpy_inplace(gamma, t, y2);
        check_finite(y2, "y2", n);

        // p2_i = J_{gamma B_i^{-1}}(y2_i - gamma r_i) + b2_i
        Vector arg2 = y2;
        axpy_inplace(-gamma, blk.r, arg2);
        Vector p2 = blk.B.inverse_resolvent(gamma, arg2);
        if (counts) ++counts->resolvent_B[i];
        p2 += errors.b2[i];
        check_finite(p2, "p2", n);

        // q2_i = p2_i + gamma (L_i p1 - D_i^{-1} p2_i + c2_i)
        Vector s = blk.L.apply(p1);
        s -= blk.D_inv.apply(p2);
        s += errors.c2[i];
        if (counts) {
            ++counts->forward_L[i];
            ++counts->forward_D[i];
        }
        Vector q2 = p2;
        axpy_inplace(gamma, s, q2);
        check_finite(q2, "q2", n);

        // v_{i,n+1} = v_i - y2_i + q2_i
        Vector vn = state.v[i];
        vn -= y2;
        vn += q2;
        check_finite(vn, "v", n);

        work.y2.push_back(std::move(y2));
        work.p2.push_back(std::move(p2));
        work.q2.push_back(std::move(q2));
        next.v.push_back(std::move(vn));
    }

    // q1 = p1 - gamma (C p1 + sum_i L_i^* p2_i + c1)
    Vector w = spec.C.apply(p1);
    if (counts) ++counts->forward_C;
    for (int i = 0; i < m; ++i) {
        w += spec.blocks[i].L.apply_adjoint(work.p2[i]);
        if (counts) ++counts->adjoint_L[i];
    }
    w += errors.c1;
    Vector q1 = p1;
    axpy_inplace(-gamma, w, q1);
    check_finite(q1, "q1", n);
    work.q1 = q1;

    // x_{n+1} = x_n - y1 + q1
    next.x = state.x;
    next.x -= y1;
    next.x += q1;
    check_finite(next.x, "x", n);

    return StepResult{std::move(next), std::move(work)};
}

ProductResolvent assemble_M(const ProblemSpec& spec) {
    spec.validate();
    return ProductResolvent{[spec](double gamma, const BlockVector& k) {
        if (k.block_count() != static_cast<std::size_t>(spec.m() + 1)) {
            throw ShapeError("assemble_M: wrong block count");
        }
        std::vector<Vector> out;
        out.reserve(k.block_count());
        Vector arg1 = k.block(0);
        axpy_inplace(gamma, spec.z, arg1);
        out.push_back(spec.A.resolvent(gamma, arg1));
        for (int i = 0; i < spec.m(); ++i) {
            Vector arg = k.block(static_cast<std::size_t>(i) + 1);
            axpy_inplace(-gamma, spec.blocks[i].r, arg);
            out.push_back(spec.blocks[i].B.inverse_resolvent(gamma, arg));
        }
        return BlockVector(std::move(out));
    }};
}

ProductOperator assemble_Q(const ProblemSpec& spec) {
    double beta = compute_beta(spec);
    return ProductOperator{[spec](const BlockVector& k) {
                               if (k.block_count() != static_cast<std::size_t>(spec.m() + 1)) {
                                   throw ShapeError("assemble_Q: wrong block count");
                               }
                               const Vector& x = k.block(0);
                               std::vector<Vector> out;
                               out.reserve(k.block_count());
                               Vector first = spec.C.apply(x);
                               for (int i = 0; i < spec.m(); ++i) {
                                   first += spec.blocks[i].L.apply_adjoint(
                                       k.block(static_cast<std::size_t>(i) + 1));
                               }
                               out.push_back(std::move(first));
                               for (int i = 0; i < spec.m(); ++i) {
                                   const Block& blk = spec.blocks[i];
                                   Vector g = blk.D_inv.apply(k.block(static_cast<std::size_t>(i) + 1));
                                   g -= blk.L.apply(x);
                                   out.push_back(std::move(g));
                               }
                               return BlockVector(std::move(out));
                           },
                           beta};
}

BlockVector pack_state(const PrimalDualState& state) {
    std::vector<Vector> blocks;
    blocks.reserve(state.v.size() + 1);
    blocks.push_back(state.x);
    for (const Vector& vi : state.v) blocks.push_back(vi);
    return BlockVector(std::move(blocks));
}

PrimalDualState unpack_state(const BlockVector& k, long n) {
    if (k.block_count() < 2) throw ShapeError("unpack_state: need at least two blocks");
    PrimalDualState st{k.block(0), {}, n};
    for (std::size_t i = 1; i < k.block_count(); ++i) st.v.push_back(k.block(i));
    return st;
}

ProductErrors pack_errors(const IterationErrors& errors) {
    std::vector<Vector> a{errors.a1};
    std::vector<Vector> b{errors.b1};
    std::vector<Vector> c{errors.c1};
    for (const Vector& e : errors.a2) a.push_back(-e);
    for (const Vector& e : errors.b2) b.push_back(e);
    for (const Vector& e : errors.c2) c.push_back(-e);
    return ProductErrors{BlockVector(std::move(a)), BlockVector(std::move(b)),
                         BlockVector(std::move(c))};
}

BlockVector fbf_step_product(const ProductResolvent& M, const ProductOperator& Q,
                             const BlockVector& x, double gamma, const ProductErrors& errors) {
    BlockVector qa = Q.apply(x);
    qa += errors.a;
    BlockVector y = x;
    axpy_inplace(-gamma, qa, y);
    BlockVector p = M.apply(gamma, y);
    p += errors.b;
    BlockVector qc = Q.apply(p);
    qc += errors.c;
    BlockVector q = p;
    axpy_inplace(-gamma, qc, q);
    BlockVector next = x;
    next -= y;
    next += q;
    return next;
}

BlockVector fbf_step_product(const ProductResolvent& M, const ProductOperator& Q,
                             const BlockVector& x, double gamma) {
    BlockVector zero = x;
    zero *= 0.0;
    return fbf_step_product(M, Q, x, gamma, ProductErrors{zero, zero, zero});
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::ResidualTolerance: return "ResidualTolerance";
        case Termination::MaxIterations: return "MaxIterations";
        case Termination::Diverged: return "Diverged";
    }
    return "unknown";
}

double kkt_residual(const ProblemSpec& spec, const PrimalDualState& state, double gamma_check) {
    if (gamma_check <= 0.0) throw ConfigError("kkt_residual: gamma_check must be positive");
    // primal: |x - J_{gA}(x + g (z - sum_i L_i^* v_i - C x))|
    Vector w = spec.z;
    for (int i = 0; i < spec.m(); ++i) {
        w -= spec.blocks[i].L.apply_adjoint(state.v[i]);
    }
    w -= spec.C.apply(state.x);
    Vector arg = state.x;
    axpy_inplace(gamma_check, w, arg);
    double res = norm(state.x - spec.A.resolvent(gamma_check, arg));
    // block i: |v_i - J_{gB_i^{-1}}(v_i + g (L_i x - r_i - D_i^{-1} v_i))|
    for (int i = 0; i < spec.m(); ++i) {
        const Block& blk = spec.blocks[i];
        Vector wi = blk.L.apply(state.x);
        wi -= blk.r;
        wi -= blk.D_inv.apply(state.v[i]);
        Vector argi = state.v[i];
        axpy_inplace(gamma_check, wi, argi);
        res = std::max(res, norm(state.v[i] - blk.B.inverse_resolvent(gamma_check, argi)));
    }
    return res;
}

DualCertificate dual_solution_certificate(const ProblemSpec& spec, const PrimalDualState& state,
                                          double gamma_check) {
    if (gamma_check <= 0.0) throw ConfigError("dual_solution_certificate: gamma_check > 0");
    DualCertificate cert{};
    Vector w = spec.z;
    for (int i = 0; i < spec.m(); ++i) {
        w -= spec.blocks[i].L.apply_adjoint(state.v[i]);
    }
    w -= spec.C.apply(state.x);
    Vector arg = state.x;
    axpy_inplace(gamma_check, w, arg);
    cert.primal_inclusion_residual = norm(state.x - spec.A.resolvent(gamma_check, arg));
    cert.max_residual = cert.primal_inclusion_residual;
    for (int i = 0; i < spec.m(); ++i) {
        const Block& blk = spec.blocks[i];
        Vector wi = blk.L.apply(state.x);
        wi -= blk.r;
        wi -= blk.D_inv.apply(state.v[i]);
        Vector argi = state.v[i];
        axpy_inplace(gamma_check, wi, argi);
        double res = norm(state.v[i] - blk.B.inverse_resolvent(gamma_check, argi));
        cert.block_residuals.push_back(res);
        cert.max_residual = std::max(cert.max_residual, res);
    }
    return cert;
}

SolveReport solve(const ProblemSpec& spec, const StepPolicy& policy, const ErrorInjector& injector,
                  PrimalDualState init, const StoppingRule& stop, const TraceCallback& trace) {
    spec.validate();
    double beta = compute_beta(spec);
    if (std::abs(policy.beta - beta) > 1e-12 * std::max(1.0, beta)) {
        throw ConfigError("solve: policy beta " + std::to_string(policy.beta) +
                          " inconsistent with spec beta " + std::to_string(beta));
    }
    if (!policy.gamma) throw ConfigError("solve: policy has no gamma schedule");
    if (init.x.space() != spec.H || static_cast<int>(init.v.size()) != spec.m()) {
        throw ShapeError("solve: initial state structure mismatch");
    }

    std::vector<TracePoint> history;
    EvalCounts counts = EvalCounts::zeros(spec);
    PrimalDualState state = std::move(init);
    Termination termination = Termination::MaxIterations;
    long iterations = 0;
    const double slack = 1e-12 * (1.0 + policy.gamma_max());

    for (long k = 0; k < stop.max_iter; ++k) {
        const long n = state.n;
        const double gamma = policy.gamma(n);
        if (gamma < policy.gamma_min() - slack || gamma > policy.gamma_max() + slack) {
            throw ConfigError("solve: gamma_" + std::to_string(n) + " = " + std::to_string(gamma) +
                              " outside [" + std::to_string(policy.gamma_min()) + ", " +
                              std::to_string(policy.gamma_max()) + "]");
        }
        IterationErrors errors = sample_errors(injector, spec, n);

        std::optional<StepResult> sr;
        try {
            sr.emplace(fbf_step(spec, state, gamma, errors, &counts));
        } catch (const DivergenceError&) {
            termination = Termination::Diverged;
            iterations = k;
            break;
        }

        TracePoint pt;
        pt.n = n;
        pt.gamma = gamma;
        pt.primal_res = norm(state.x - sr->work.p1);
        double dual_max = 0.0;
        for (int i = 0; i < spec.m(); ++i) {
            double d = norm(state.v[i] - sr->work.p2[i]);
            pt.dual_res.push_back(d);
            dual_max = std::max(dual_max, d);
        }
        pt.kkt = kkt_residual(spec, sr->state);
        history.push_back(pt);
        if (trace) trace(pt, sr->state);

        const double x_scale = 1.0 + norm(state.x);
        state = std::move(sr->state);
        iterations = k + 1;

        double state_norm = norm(state.x);
        for (const Vector& vi : state.v) state_norm = std::max(state_norm, norm(vi));
        if (state_norm > kDivergenceGuard) {
            termination = Termination::Diverged;
            break;
        }
        if (std::max(pt.primal_res, dual_max) <= stop.tol * x_scale) {
            termination = Termination::ResidualTolerance;
            break;
        }
    }
    return SolveReport{std::move(state), std::move(history), termination, iterations,
                       std::move(counts)};
}

}  // namespace pdsplit
