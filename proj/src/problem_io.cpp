#include "pdsplit/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pdsplit/oracle.hpp"

namespace pdsplit::io {

namespace {

const json& require_field(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path + "." + key, "missing field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

long as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<long>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> as_real_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Vector as_vector(const json& j, Space s, const std::string& path) {
    std::vector<double> e = as_real_array(j, path);
    if (e.size() != static_cast<std::size_t>(s.dim)) {
        throw SchemaError(path, "expected " + std::to_string(s.dim) + " entries, got " +
                                    std::to_string(e.size()));
    }
    for (double x : e) {
        if (!std::isfinite(x)) throw SchemaError(path, "non-finite entry");
    }
    return Vector(s, std::move(e));
}

Space parse_space(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object with a 'dim' field");
    long dim = as_integer(require_field(j, "dim", path), path + ".dim");
    if (dim < 1) throw SchemaError(path + ".dim", "dimension must be >= 1");
    return Space(static_cast<int>(dim));
}

ProxFunction parse_prox_function(const json& j, Space s, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected a function object");
    std::string type = as_string(require_field(j, "type", path), path + ".type");
    if (type == "zero") return zero_function(s);
    if (type == "linear") return linear_function(s, as_vector(require_field(j, "a", path), s, path + ".a"));
    if (type == "quadratic") {
        return diagonal_quadratic(s, as_vector(require_field(j, "m", path), s, path + ".m"),
                                  as_vector(require_field(j, "b", path), s, path + ".b"));
    }
    if (type == "l1") {
        double w = as_number(require_field(j, "weight", path), path + ".weight");
        if (w <= 0.0) throw SchemaError(path + ".weight", "must be positive");
        return l1_norm(s, w);
    }
    if (type == "l2") {
        double w = as_number(require_field(j, "weight", path), path + ".weight");
        if (w <= 0.0) throw SchemaError(path + ".weight", "must be positive");
        return euclidean_norm(s, w);
    }
    if (type == "box") {
        Vector lo = as_vector(require_field(j, "lo", path), s, path + ".lo");
        Vector hi = as_vector(require_field(j, "hi", path), s, path + ".hi");
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (lo[i] > hi[i]) throw SchemaError(path, "box has lo > hi");
        }
        return box_indicator(s, std::move(lo), std::move(hi));
    }
    if (type == "ball") {
        Vector c = as_vector(require_field(j, "center", path), s, path + ".center");
        double radius = as_number(require_field(j, "radius", path), path + ".radius");
        if (radius <= 0.0) throw SchemaError(path + ".radius", "must be positive");
        return ball_indicator(s, std::move(c), radius);
    }
    if (type == "hyperplane") {
        Vector a = as_vector(require_field(j, "a", path), s, path + ".a");
        if (norm(a) == 0.0) throw SchemaError(path + ".a", "zero normal");
        double b = as_number(require_field(j, "b", path), path + ".b");
        return hyperplane_indicator(s, std::move(a), b);
    }
    if (type == "nonneg") return nonnegative_indicator(s);
    if (type == "zero_set") return zero_point_indicator(s);
    if (type == "huber") {
        double delta = as_number(require_field(j, "delta", path), path + ".delta");
        if (delta <= 0.0) throw SchemaError(path + ".delta", "must be positive");
        return huber_function(s, delta);
    }
    throw SchemaError(path + ".type", "unknown function type '" + type + "'");
}

struct ParsedH {
    SmoothFunction h;
    SmoothForm form;
    double weight;
    Vector center;
};

ParsedH parse_h(const json& j, Space s, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected a function object");
    std::string type = as_string(require_field(j, "type", path), path + ".type");
    std::optional<double> override;
    if (j.contains("lipschitz_override")) {
        override = as_number(j["lipschitz_override"], path + ".lipschitz_override");
        if (*override < 0.0) throw SchemaError(path + ".lipschitz_override", "must be >= 0");
    }
    if (type == "zero") {
        return ParsedH{zero_smooth(s), SmoothForm::Zero, 0.0, Vector(s)};
    }
    if (type == "quadratic") {
        double w = as_number(require_field(j, "weight", path), path + ".weight");
        if (w <= 0.0) throw SchemaError(path + ".weight", "must be positive");
        Vector c = as_vector(require_field(j, "center", path), s, path + ".center");
        SmoothFunction base = quadratic_smooth(s, w, c);
        if (override) {
            base = SmoothFunction(
                s, "quadratic", [base](const Vector& x) { return base.gradient(x); }, *override,
                [base](const Vector& x) { return base.value(x); });
        }
        return ParsedH{std::move(base), SmoothForm::Quadratic, w, std::move(c)};
    }
    throw SchemaError(path + ".type", "unknown smooth type '" + type + "' (zero|quadratic)");
}

struct ParsedLStar {
    SmoothFunction l_star;
    SmoothForm form;
    double nu;
};

ParsedLStar parse_l_star(const json& j, Space s, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected a function object");
    std::string type = as_string(require_field(j, "type", path), path + ".type");
    std::optional<double> override;
    if (j.contains("lipschitz_override")) {
        override = as_number(j["lipschitz_override"], path + ".lipschitz_override");
        if (*override < 0.0) throw SchemaError(path + ".lipschitz_override", "must be >= 0");
    }
    if (type == "zero") {
        return ParsedLStar{zero_smooth(s), SmoothForm::Zero, 0.0};
    }
    if (type == "quadratic") {
        double nu = as_number(require_field(j, "nu", path), path + ".nu");
        if (nu <= 0.0) throw SchemaError(path + ".nu", "must be positive");
        SmoothFunction base = quadratic_smooth(s, nu, Vector(s));
        if (override) {
            base = SmoothFunction(
                s, "quadratic", [base](const Vector& v) { return base.gradient(v); }, *override,
                [base](const Vector& v) { return base.value(v); });
        }
        return ParsedLStar{std::move(base), SmoothForm::Quadratic, nu};
    }
    throw SchemaError(path + ".type", "unknown smooth type '" + type + "' (zero|quadratic)");
}

LinearOperator parse_linear_operator(const json& j, Space domain, Space codomain,
                                     const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an operator object");
    std::string type = as_string(require_field(j, "type", path), path + ".type");
    if (type == "identity") {
        if (domain != codomain) {
            throw SchemaError(path, "identity operator requires matching dimensions");
        }
        return LinearOperator::identity(domain);
    }
    if (type == "diagonal") {
        if (domain != codomain) {
            throw SchemaError(path, "diagonal operator requires matching dimensions");
        }
        std::vector<double> d =
            as_real_array(require_field(j, "entries", path), path + ".entries");
        if (d.size() != static_cast<std::size_t>(domain.dim)) {
            throw SchemaError(path + ".entries", "wrong number of entries");
        }
        return LinearOperator::diagonal(domain, std::move(d));
    }
    if (type == "dense") {
        long rows = as_integer(require_field(j, "rows", path), path + ".rows");
        long cols = as_integer(require_field(j, "cols", path), path + ".cols");
        if (rows != codomain.dim || cols != domain.dim) {
            throw SchemaError(path, "matrix shape " + std::to_string(rows) + "x" +
                                        std::to_string(cols) + " inconsistent with spaces " +
                                        std::to_string(codomain.dim) + "x" +
                                        std::to_string(domain.dim));
        }
        std::vector<double> data =
            as_real_array(require_field(j, "data", path), path + ".data");
        if (data.size() != static_cast<std::size_t>(rows * cols)) {
            throw SchemaError(path + ".data", "expected " + std::to_string(rows * cols) +
                                                  " entries (row-major)");
        }
        return LinearOperator::dense(domain, codomain, std::move(data));
    }
    throw SchemaError(path + ".type", "unknown operator type '" + type + "'");
}

SolverOptions parse_solver_options(const json& doc) {
    SolverOptions opt;
    if (!doc.contains("solver")) return opt;
    const json& j = doc["solver"];
    if (!j.is_object()) throw SchemaError("solver", "expected an object");
    if (j.contains("tol")) {
        opt.tol = as_number(j["tol"], "solver.tol");
        if (opt.tol <= 0.0) throw SchemaError("solver.tol", "must be positive");
    }
    if (j.contains("max_iter")) {
        opt.max_iter = as_integer(j["max_iter"], "solver.max_iter");
        if (opt.max_iter < 0) throw SchemaError("solver.max_iter", "must be >= 0");
    }
    if (j.contains("gamma")) {
        const json& g = j["gamma"];
        if (g.is_string()) {
            if (g.get<std::string>() != "max") {
                throw SchemaError("solver.gamma", "expected 'max' or a number");
            }
        } else {
            opt.gamma = as_number(g, "solver.gamma");
            if (*opt.gamma <= 0.0) throw SchemaError("solver.gamma", "must be positive");
        }
    }
    if (j.contains("seed")) {
        long s = as_integer(j["seed"], "solver.seed");
        if (s < 0) throw SchemaError("solver.seed", "must be >= 0");
        opt.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("inject")) {
        opt.inject = as_string(j["inject"], "solver.inject");
        if (opt.inject != "none" && opt.inject != "spike" && opt.inject != "decay") {
            throw SchemaError("solver.inject", "expected none|spike|decay");
        }
    }
    return opt;
}

}  // namespace

LoadedProblem parse_problem(const json& doc) {
    if (!doc.is_object()) throw SchemaError("", "problem file must be a JSON object");
    if (doc.contains("template")) {
        std::string name = as_string(doc["template"], "template");
        json expanded = template_json(name);
        // solver options in the referencing file win
        if (doc.contains("solver")) expanded["solver"] = doc["solver"];
        return parse_problem(expanded);
    }

    Space H = parse_space(require_field(doc, "space", ""), "space");
    Vector z = doc.contains("z") ? as_vector(doc["z"], H, "z") : Vector(H);
    ProxFunction f = parse_prox_function(require_field(doc, "f", ""), H, "f");
    ParsedH h = parse_h(require_field(doc, "h", ""), H, "h");

    const json& jblocks = require_field(doc, "blocks", "");
    if (!jblocks.is_array() || jblocks.empty()) {
        throw SchemaError("blocks", "expected a non-empty array");
    }
    std::vector<MinBlock> blocks;
    for (std::size_t i = 0; i < jblocks.size(); ++i) {
        const std::string path = "blocks[" + std::to_string(i) + "]";
        const json& jb = jblocks[i];
        if (!jb.is_object()) throw SchemaError(path, "expected an object");
        Space G = parse_space(require_field(jb, "space", path), path + ".space");
        ProxFunction g = parse_prox_function(require_field(jb, "g", path), G, path + ".g");
        ParsedLStar ls = parse_l_star(require_field(jb, "l_star", path), G, path + ".l_star");
        LinearOperator L =
            parse_linear_operator(require_field(jb, "L", path), H, G, path + ".L");
        double L_norm = 0.0;
        if (jb.contains("norm")) {
            L_norm = as_number(jb["norm"], path + ".norm");
            if (L_norm <= 0.0) throw SchemaError(path + ".norm", "must be positive");
        } else {
            L_norm = operator_norm(L);
            if (L_norm <= 0.0) throw SchemaError(path + ".L", "operator appears to be zero");
        }
        Vector r = jb.contains("r") ? as_vector(jb["r"], G, path + ".r") : Vector(G);
        blocks.push_back(MinBlock{G, std::move(g), std::move(ls.l_star), ls.form, ls.nu, nullptr,
                                  std::move(L), L_norm, std::move(r)});
    }

    MinimizationSpec spec{H,        std::move(z), std::move(f), std::move(h.h),
                          h.form,   h.weight,     std::move(h.center), std::move(blocks)};
    spec.validate();
    return LoadedProblem{std::move(spec), parse_solver_options(doc)};
}

LoadedProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot open file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("JSON parse error: ") + e.what());
    }
    return parse_problem(doc);
}

std::vector<ValidationIssue> validate_properties(const MinimizationSpec& spec,
                                                 std::uint64_t seed) {
    std::vector<ValidationIssue> issues;
    const int op_samples = 100;

    auto check_smooth = [&](const SmoothFunction& s, const std::string& where,
                            std::uint64_t salt) {
        LipschitzOperator op(
            s.space(), [s](const Vector& x) { return s.gradient(x); }, s.lipschitz_constant());
        MonotonicityReport rep = check_monotone(op, op_samples, seed + salt);
        if (!rep.monotone_ok) issues.push_back({"monotone", where, rep.min_inner});
        if (!rep.lipschitz_ok) issues.push_back({"lipschitz", where, rep.max_ratio});
    };
    check_smooth(spec.h, "h", 11);

    auto check_moreau = [&](const ProxFunction& f, const std::string& where, std::uint64_t salt) {
        Rng rng(seed + salt);
        const double gammas[] = {0.1, 1.0, 10.0};
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            Vector y = normal_vector(rng, f.space());
            for (double g : gammas) {
                Vector lhs = f.prox(g, y);
                axpy_inplace(g, prox_conjugate(f, 1.0 / g, (1.0 / g) * y), lhs);
                worst = std::max(worst, norm(lhs - y) / (1.0 + norm(y)));
            }
        }
        if (worst > 1e-9) issues.push_back({"moreau", where, worst});
    };
    check_moreau(spec.f, "f", 23);

    for (int i = 0; i < spec.m(); ++i) {
        const MinBlock& blk = spec.blocks[i];
        const std::string path = "blocks[" + std::to_string(i) + "]";
        double defect = adjoint_defect(blk.L, op_samples, seed + 31 + static_cast<std::uint64_t>(i));
        if (defect > 1e-10) issues.push_back({"adjoint", path + ".L", defect});
        check_smooth(blk.l_star, path + ".l_star", 41 + static_cast<std::uint64_t>(i));
        check_moreau(blk.g, path + ".g", 59 + static_cast<std::uint64_t>(i));
    }
    return issues;
}

// ----- templates -------------------------------------------------------------

namespace {

json identity_op() { return json{{"type", "identity"}}; }

json classical_duality_template() {
    return json{
        {"space", {{"dim", 2}}},
        {"z", {2.0, -3.0}},
        {"f", {{"type", "quadratic"}, {"m", {1.0, 1.0}}, {"b", {0.0, 0.0}}}},
        {"h", {{"type", "zero"}}},
        {"blocks",
         json::array({json{{"space", {{"dim", 2}}},
                           {"g", {{"type", "l1"}, {"weight", 1.0}}},
                           {"l_star", {{"type", "zero"}}},
                           {"L", {{"type", "diagonal"}, {"entries", {2.0, 1.0}}}},
                           {"r", {0.5, -0.3}}}})},
        {"solver", {{"tol", 1e-10}, {"max_iter", 20000}}}};
}

json yosida_template() {
    return json{
        {"space", {{"dim", 1}}},
        {"z", {0.0}},
        {"f", {{"type", "box"}, {"lo", {-1.0}}, {"hi", {2.0}}}},
        {"h", {{"type", "zero"}}},
        {"blocks",
         json::array({json{{"space", {{"dim", 1}}},
                           {"g", {{"type", "quadratic"}, {"m", {1.0}}, {"b", {3.0}}}},
                           {"l_star", {{"type", "quadratic"}, {"nu", 0.5}}},
                           {"L", identity_op()},
                           {"r", {0.0}}}})},
        {"solver", {{"tol", 1e-10}, {"max_iter", 20000}}}};
}

json tseng_template() {
    return json{
        {"space", {{"dim", 1}}},
        {"z", {0.0}},
        {"f", {{"type", "box"}, {"lo", {1.0}}, {"hi", {2.0}}}},
        {"h", {{"type", "quadratic"}, {"weight", 1.0}, {"center", {0.3}}}},
        {"blocks",
         json::array({json{{"space", {{"dim", 1}}},
                           {"g", {{"type", "zero"}}},
                           {"l_star", {{"type", "zero"}}},
                           {"L", identity_op()},
                           {"r", {0.0}}}})},
        {"solver", {{"tol", 1e-10}, {"max_iter", 20000}}}};
}

json example18_template() {
    // Quadratic data fit: 2 blocks, h = 0.5 |x - c|^2 encoding.
    const std::vector<double> center{1.8, -0.4, 2.5, 0.6, -1.3};
    const std::vector<double> l2_data{
        0.31, -0.42, 0.05,  0.27, -0.11,   // row 0
        -0.38, 0.14, 0.46, -0.05, 0.22,    // row 1
        0.09,  0.33, -0.29, 0.41, -0.47};  // row 2
    const std::vector<double> r2{0.3, -0.2, 0.1};
    // Ball radius leaves a unit margin around the data-fit solution, so the
    // constraint is strictly inactive at the optimum.
    Space H(5), G2(3);
    Vector c(H, center);
    Vector xbar = oracle::soft_threshold(c, 1.0);
    LinearOperator L2 = LinearOperator::dense(H, G2, l2_data);
    double radius = norm(L2.apply(xbar) - Vector(G2, r2)) + 1.0;
    return json{
        {"space", {{"dim", 5}}},
        {"z", {0.0, 0.0, 0.0, 0.0, 0.0}},
        {"f", {{"type", "zero"}}},
        {"h", {{"type", "quadratic"}, {"weight", 1.0}, {"center", center}}},
        {"blocks",
         json::array(
             {json{{"space", {{"dim", 5}}},
                   {"g", {{"type", "l1"}, {"weight", 1.0}}},
                   {"l_star", {{"type", "zero"}}},
                   {"L", identity_op()},
                   {"r", {0.0, 0.0, 0.0, 0.0, 0.0}}},
              json{{"space", {{"dim", 3}}},
                   {"g", {{"type", "ball"}, {"center", {0.0, 0.0, 0.0}}, {"radius", radius}}},
                   {"l_star", {{"type", "zero"}}},
                   {"L", {{"type", "dense"}, {"rows", 3}, {"cols", 5}, {"data", l2_data}}},
                   {"r", r2}}})},
        {"solver", {{"tol", 1e-9}, {"max_iter", 20000}}}};
}

json remark44_template() {
    return json{
        {"space", {{"dim", 3}}},
        {"z", {1.7, 0.4, -0.8}},
        {"f", {{"type", "nonneg"}}},
        {"h", {{"type", "quadratic"}, {"weight", 1.0}, {"center", {0.0, 0.0, 0.0}}}},
        {"blocks",
         json::array({json{{"space", {{"dim", 3}}},
                           {"g", {{"type", "l1"}, {"weight", 1.0}}},
                           {"l_star", {{"type", "zero"}}},
                           {"L", identity_op()},
                           {"r", {0.0, 0.0, 0.0}}}})},
        {"solver", {{"tol", 1e-10}, {"max_iter", 20000}}}};
}

}  // namespace

std::vector<std::string> template_names() {
    return {"classical-duality", "yosida", "tseng", "example18", "remark44"};
}

json template_json(const std::string& name) {
    if (name == "classical-duality") return classical_duality_template();
    if (name == "yosida") return yosida_template();
    if (name == "tseng") return tseng_template();
    if (name == "example18") return example18_template();
    if (name == "remark44") return remark44_template();
    throw SchemaError("template", "unknown template '" + name + "'");
}

// ----- solve orchestration ----------------------------------------------------

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

RunResult run_problem(const LoadedProblem& problem, const RunOverrides& overrides) {
    SolverOptions opt = problem.options;
    if (overrides.tol) opt.tol = *overrides.tol;
    if (overrides.max_iter) opt.max_iter = *overrides.max_iter;
    if (overrides.seed) opt.seed = *overrides.seed;
    if (overrides.inject) opt.inject = *overrides.inject;
    if (overrides.gamma) opt.gamma = *overrides.gamma;
    const long stride = overrides.trace_every > 0 ? overrides.trace_every : 1;

    const MinimizationSpec& m = problem.spec;
    const int nblocks = m.m();

    std::ostringstream csv;
    csv << "n,gamma,primal_res";
    for (int i = 1; i <= nblocks; ++i) csv << ",dual_res_" << i;
    csv << ",kkt,primal_obj,dual_obj,gap\n";

    MinimizeOptions mo;
    mo.stop = StoppingRule{opt.tol, opt.max_iter};
    mo.gamma = opt.gamma;
    if (opt.inject == "spike") {
        mo.make_injector = [seed = opt.seed](const ProblemSpec& s) {
            return ErrorInjector::spike(s, 5.0, seed);
        };
    } else if (opt.inject == "decay") {
        mo.make_injector = [seed = opt.seed](const ProblemSpec& s) {
            return ErrorInjector::decay(s, 0.1, seed);
        };
    }
    mo.trace = [&csv, stride](const TracePoint& pt, const PrimalDualState&,
                              const ObjectiveSample& obj) {
        if (pt.n % stride != 0) return;
        csv << pt.n << ',' << format_real(pt.gamma) << ',' << format_real(pt.primal_res);
        for (double d : pt.dual_res) csv << ',' << format_real(d);
        csv << ',' << format_real(pt.kkt) << ',';
        if (obj.available) {
            csv << format_real(obj.primal) << ',' << format_real(obj.dual) << ','
                << format_real(obj.gap);
        } else {
            csv << ",,";
        }
        csv << '\n';
    };

    MinimizeResult res = solve_minimization(m, mo);

    const PrimalDualState& fin = res.report.final;
    json xj = json::array();
    for (std::size_t i = 0; i < fin.x.size(); ++i) xj.push_back(fin.x[i]);
    json vj = json::array();
    for (const Vector& vi : fin.v) {
        json one = json::array();
        for (std::size_t k = 0; k < vi.size(); ++k) one.push_back(vi[k]);
        vj.push_back(one);
    }
    ProblemSpec spec = to_problem_spec(m);
    double kkt = kkt_residual(spec, fin);
    json solution{{"x", xj},
                  {"v", vj},
                  {"iterations", res.report.iterations},
                  {"certificate",
                   {{"kkt_residual", kkt},
                    {"primal_objective", format_real(res.objectives.primal)},
                    {"dual_objective", format_real(res.objectives.dual)},
                    {"gap", format_real(res.objectives.gap)},
                    {"termination", termination_name(res.report.termination)}}}};
    return RunResult{std::move(res.report), res.objectives, csv.str(), std::move(solution)};
}

}  // namespace pdsplit::io
