#include <cstdint>
#include <optional>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pdsplit/problem_io.hpp"

namespace {

// Exit codes: 0 solved/ok, 2 schema error, 3 property violation,
// 4 iteration cap, 5 divergence guard.
enum ExitCode : int {
    kOk = 0,
    kSchemaError = 2,
    kPropertyViolation = 3,
    kMaxIterations = 4,
    kDiverged = 5,
};

int run_validate(const std::string& path, std::uint64_t seed) {
    std::optional<pdsplit::io::LoadedProblem> problem;
    try {
        problem.emplace(pdsplit::io::load_problem_file(path));
    } catch (const pdsplit::io::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kSchemaError;
    }
    auto issues = pdsplit::io::validate_properties(problem->spec, seed);
    if (!issues.empty()) {
        for (const auto& issue : issues) {
            std::cerr << "property violation: " << issue.property << " at " << issue.where
                      << " worst=" << pdsplit::io::format_real(issue.worst) << "\n";
        }
        return kPropertyViolation;
    }
    std::cout << "ok: schema and sampled operator properties hold (seed " << seed << ")\n";
    return kOk;
}

struct SolveArgs {
    std::string path;
    std::string trace_path;
    std::string solution_path;
    pdsplit::io::RunOverrides overrides;
};

int run_solve(const SolveArgs& args) {
    std::optional<pdsplit::io::LoadedProblem> problem;
    try {
        problem.emplace(pdsplit::io::load_problem_file(args.path));
    } catch (const pdsplit::io::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kSchemaError;
    }

    std::optional<pdsplit::io::RunResult> result;
    try {
        result.emplace(pdsplit::io::run_problem(*problem, args.overrides));
    } catch (const pdsplit::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kSchemaError;
    }

    if (!args.trace_path.empty()) {
        std::ofstream out(args.trace_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write trace file '" << args.trace_path << "'\n";
            return kSchemaError;
        }
        out << result->trace_csv;
    }
    if (!args.solution_path.empty()) {
        std::ofstream out(args.solution_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write solution file '" << args.solution_path << "'\n";
            return kSchemaError;
        }
        out << result->solution.dump(2) << "\n";
    }
    std::cout << result->solution["certificate"].dump(2) << "\n";

    switch (result->report.termination) {
        case pdsplit::Termination::ResidualTolerance: return kOk;
        case pdsplit::Termination::MaxIterations: return kMaxIterations;
        case pdsplit::Termination::Diverged: return kDiverged;
    }
    return kOk;
}

int run_templates_list() {
    for (const auto& name : pdsplit::io::template_names()) std::cout << name << "\n";
    return kOk;
}

int run_templates_emit(const std::string& name, const std::string& out_path) {
    pdsplit::io::json doc;
    try {
        doc = pdsplit::io::template_json(name);
    } catch (const pdsplit::io::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSchemaError;
    }
    if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write '" << out_path << "'\n";
            return kSchemaError;
        }
        out << doc.dump(2) << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pdsplit: primal-dual splitting solver for structured monotone inclusions "
                 "and composite minimization"};
    app.require_subcommand(1);

    // validate
    std::string validate_path;
    std::uint64_t validate_seed = 0;
    CLI::App* validate = app.add_subcommand("validate", "check a problem file (schema + "
                                                        "sampled operator properties)");
    validate->add_option("file", validate_path, "problem file (JSON)")->required();
    validate->add_option("--seed", validate_seed, "RNG seed for property sampling");

    // solve
    SolveArgs solve_args;
    double tol = 0.0;
    long max_iter = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string inject;
    double gamma = 0.0;
    CLI::App* solve = app.add_subcommand("solve", "solve a problem file and emit certificates");
    solve->add_option("file", solve_args.path, "problem file (JSON)")->required();
    solve->add_option("--tol", tol, "relative residual tolerance");
    solve->add_option("--max-iter", max_iter, "iteration cap");
    solve->add_option("--trace", solve_args.trace_path, "write per-iteration trace CSV here");
    solve->add_option("--trace-every", solve_args.overrides.trace_every,
                      "record every k-th iteration in the trace");
    solve->add_option("--seed", seed, "seed for error-injection directions")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    solve->add_option("--inject", inject, "error-injection preset: none|spike|decay")
        ->check(CLI::IsMember({"none", "spike", "decay"}));
    solve->add_option("--gamma", gamma, "constant step size (must satisfy the step bound)");
    solve->add_option("--solution", solve_args.solution_path, "write final state JSON here");

    // templates
    CLI::App* templates = app.add_subcommand("templates", "list or emit shipped problem files");
    templates->require_subcommand(1);
    CLI::App* tlist = templates->add_subcommand("list", "list template names");
    std::string emit_name;
    std::string emit_out;
    CLI::App* temit = templates->add_subcommand("emit", "write a ready-to-run problem file");
    temit->add_option("name", emit_name, "template name")->required();
    temit->add_option("--out", emit_out, "output path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return run_validate(validate_path, validate_seed);
    if (solve->parsed()) {
        if (tol > 0.0) solve_args.overrides.tol = tol;
        if (max_iter >= 0) solve_args.overrides.max_iter = max_iter;
        if (seed_set) solve_args.overrides.seed = seed;
        if (!inject.empty()) solve_args.overrides.inject = inject;
        if (gamma > 0.0) solve_args.overrides.gamma = gamma;
        return run_solve(solve_args);
    }
    if (templates->parsed()) {
        if (tlist->parsed()) return run_templates_list();
        if (temit->parsed()) return run_templates_emit(emit_name, emit_out);
    }
    return kOk;
}
