#include "pdsplit/minimize.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace pdsplit {

namespace {

double resolve_norm(const LinearOperator& L, double given) {
    if (given > 0.0) return given;
    return operator_norm(L);
}

}  // namespace

MinBlock MinBlock::simple(Space G, ProxFunction g, LinearOperator L, Vector r, double L_norm) {
    double nrm = resolve_norm(L, L_norm);
    return MinBlock{G,       std::move(g), zero_smooth(G), SmoothForm::Zero, 0.0,
                    nullptr, std::move(L), nrm,            std::move(r)};
}

MinBlock MinBlock::with_quadratic_l(Space G, ProxFunction g, double nu, LinearOperator L,
                                    Vector r, double L_norm) {
    if (nu <= 0.0) throw ConfigError("MinBlock: quadratic l* needs nu > 0");
    double nrm = resolve_norm(L, L_norm);
    return MinBlock{G,
                    std::move(g),
                    quadratic_smooth(G, nu, Vector(G)),
                    SmoothForm::Quadratic,
                    nu,
                    nullptr,
                    std::move(L),
                    nrm,
                    std::move(r)};
}

MinBlock MinBlock::with_custom_l_star(Space G, ProxFunction g, SmoothFunction l_star,
                                      LinearOperator L, Vector r, double L_norm,
                                      std::function<double(const Vector&)> infconv) {
    double nrm = resolve_norm(L, L_norm);
    return MinBlock{G,
                    std::move(g),
                    std::move(l_star),
                    SmoothForm::Custom,
                    0.0,
                    std::move(infconv),
                    std::move(L),
                    nrm,
                    std::move(r)};
}

MinimizationSpec MinimizationSpec::with_zero_h(Space H, Vector z, ProxFunction f,
                                               std::vector<MinBlock> blocks) {
    return MinimizationSpec{H,   std::move(z),     std::move(f), zero_smooth(H), SmoothForm::Zero,
                            0.0, Vector(H),        std::move(blocks)};
}

MinimizationSpec MinimizationSpec::with_quadratic_h(Space H, Vector z, ProxFunction f,
                                                    double weight, Vector center,
                                                    std::vector<MinBlock> blocks) {
    if (weight <= 0.0) throw ConfigError("MinimizationSpec: quadratic h needs weight > 0");
    SmoothFunction h = quadratic_smooth(H, weight, center);
    return MinimizationSpec{H,      std::move(z),      std::move(f), std::move(h),
                            SmoothForm::Quadratic, weight, std::move(center), std::move(blocks)};
}

MinimizationSpec MinimizationSpec::with_custom_h(Space H, Vector z, ProxFunction f,
                                                 SmoothFunction h, std::vector<MinBlock> blocks) {
    return MinimizationSpec{H,   std::move(z), std::move(f), std::move(h), SmoothForm::Custom,
                            0.0, Vector(H),    std::move(blocks)};
}

void MinimizationSpec::validate() const {
    if (blocks.empty()) throw ConfigError("MinimizationSpec: at least one block is required");
    if (z.space() != H) throw ShapeError("MinimizationSpec: z not in H");
    if (f.space() != H) throw ShapeError("MinimizationSpec: f not on H");
    if (h.space() != H) throw ShapeError("MinimizationSpec: h not on H");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const MinBlock& blk = blocks[i];
        const std::string tag = "MinimizationSpec block " + std::to_string(i);
        if (blk.g.space() != blk.G) throw ShapeError(tag + ": g not on G");
        if (blk.l_star.space() != blk.G) throw ShapeError(tag + ": l* not on G");
        if (blk.r.space() != blk.G) throw ShapeError(tag + ": r not in G");
        if (blk.L.domain() != H || blk.L.codomain() != blk.G) {
            throw ShapeError(tag + ": L does not map H to G");
        }
        if (!(blk.L_norm > 0.0)) throw ConfigError(tag + ": missing norm estimate for L");
    }
}

ProblemSpec to_problem_spec(const MinimizationSpec& m) {
    m.validate();
    ProblemSpec spec{m.H,
                     m.z,
                     to_resolvent(m.f),
                     LipschitzOperator(
                         m.H, [h = m.h](const Vector& x) { return h.gradient(x); },
                         m.h.lipschitz_constant()),
                     {}};
    for (const MinBlock& blk : m.blocks) {
        spec.blocks.push_back(Block{
            blk.G, to_resolvent(blk.g),
            LipschitzOperator(
                blk.G, [ls = blk.l_star](const Vector& v) { return ls.gradient(v); },
                blk.l_star.lipschitz_constant()),
            blk.L, blk.L_norm, blk.r});
    }
    return spec;
}

double primal_objective(const MinimizationSpec& m, const Vector& x) {
    double val = ext_add(m.f.value(x), m.h.value(x));
    val = ext_add(val, -inner(x, m.z));
    for (const MinBlock& blk : m.blocks) {
        Vector y = blk.L.apply(x);
        y -= blk.r;
        double term;
        switch (blk.l_form) {
            case SmoothForm::Zero:
                term = blk.g.value(y);
                break;
            case SmoothForm::Quadratic: {
                // (g [] |.|^2/(2 nu)) is the Moreau envelope of g at index nu
                Vector p = blk.g.prox(blk.l_nu, y);
                Vector d = y - p;
                term = ext_add(blk.g.value(p), inner(d, d) / (2.0 * blk.l_nu));
                break;
            }
            case SmoothForm::Custom:
                if (!blk.infconv_value) {
                    throw UnsupportedEvaluationError(
                        "primal_objective: no closed form for (g [] l) with custom l*");
                }
                term = blk.infconv_value(y);
                break;
            default:
                term = kPlusInfinity;
        }
        val = ext_add(val, term);
    }
    return val;
}

double dual_objective(const MinimizationSpec& m, const std::vector<Vector>& v) {
    if (static_cast<int>(v.size()) != m.m()) {
        throw ShapeError("dual_objective: wrong number of dual blocks");
    }
    Vector u = m.z;
    for (int i = 0; i < m.m(); ++i) {
        u -= m.blocks[i].L.apply_adjoint(v[i]);
    }
    double val;
    switch (m.h_form) {
        case SmoothForm::Zero:
            // h* is the indicator of {0}; (f* [] h*) = f*
            val = m.f.conjugate_value(u);
            break;
        case SmoothForm::Quadratic: {
            // h = (w/2)|x-c|^2, h*(s) = <s,c> + |s|^2/(2w);
            // (f* [] h*)(u) = <u,c> + min_s [f*(s) - <s,c> + |u-s|^2/(2w)],
            // minimized at s = prox_{w f*}(u + w c).
            Vector arg = u;
            axpy_inplace(m.h_weight, m.h_center, arg);
            Vector s = prox_conjugate(m.f, m.h_weight, arg);
            Vector d = u - s;
            val = ext_add(m.f.conjugate_value(s),
                          inner(u, m.h_center) - inner(s, m.h_center) +
                              inner(d, d) / (2.0 * m.h_weight));
            break;
        }
        default:
            throw UnsupportedEvaluationError(
                "dual_objective: no closed form for (f* [] h*) with custom h");
    }
    for (int i = 0; i < m.m(); ++i) {
        const MinBlock& blk = m.blocks[i];
        val = ext_add(val, blk.g.conjugate_value(v[i]));
        switch (blk.l_form) {
            case SmoothForm::Zero:
                break;  // l* = 0
            case SmoothForm::Quadratic:
                val = ext_add(val, 0.5 * blk.l_nu * inner(v[i], v[i]));
                break;
            case SmoothForm::Custom:
                val = ext_add(val, blk.l_star.value(v[i]));
                break;
        }
        val = ext_add(val, inner(v[i], blk.r));
    }
    return val;
}

ObjectiveReport objectives(const MinimizationSpec& m, const PrimalDualState& state) {
    ObjectiveReport rep;
    rep.primal = primal_objective(m, state.x);
    rep.dual = dual_objective(m, state.v);
    rep.gap = ext_add(rep.primal, rep.dual);
    return rep;
}

MinimizeResult solve_minimization(const MinimizationSpec& m, const MinimizeOptions& options) {
    ProblemSpec spec = to_problem_spec(m);
    double beta = compute_beta(spec);
    StepPolicy policy = options.gamma.has_value() ? StepPolicy::constant(beta, *options.gamma)
                                                  : StepPolicy::default_for_beta(beta);
    ErrorInjector injector =
        options.make_injector ? options.make_injector(spec) : ErrorInjector::none(spec);
    PrimalDualState init =
        options.make_init ? options.make_init(spec) : PrimalDualState::zeros(spec);

    TraceCallback trace = nullptr;
    if (options.trace) {
        trace = [&m, cb = options.trace](const TracePoint& pt, const PrimalDualState& st) {
            ObjectiveSample sample;
            try {
                ObjectiveReport rep = objectives(m, st);
                sample.available = true;
                sample.primal = rep.primal;
                sample.dual = rep.dual;
                sample.gap = rep.gap;
            } catch (const UnsupportedEvaluationError&) {
                sample.available = false;
            }
            cb(pt, st, sample);
        };
    }

    SolveReport report = solve(spec, policy, injector, std::move(init), options.stop, trace);
    ObjectiveReport obj{};
    try {
        obj = objectives(m, report.final);
    } catch (const UnsupportedEvaluationError&) {
        obj = ObjectiveReport{};  // degraded report, solve is unaffected
    }
    return MinimizeResult{std::move(report), obj};
}

}  // namespace pdsplit
