#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdsplit/minimize.hpp"

// Problem files: JSON documents composing catalog functions per slot
// (f / h / blocks with g, l_star, L, r, z) plus solver options. Matrices are
// dense row-major arrays; reals are emitted with 17 significant digits.

namespace pdsplit::io {

using nlohmann::json;

/// Schema violation; `path` points at the offending field (e.g. "blocks[1].g").
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path_in, const std::string& what)
        : std::runtime_error(path_in + ": " + what), path(std::move(path_in)) {}
    std::string path;
};

struct SolverOptions {
    double tol = 1e-8;
    long max_iter = 100000;
    std::optional<double> gamma;  // absent: constant maximal step
    std::uint64_t seed = 0;
    std::string inject = "none";  // none | spike | decay
};

struct LoadedProblem {
    MinimizationSpec spec;
    SolverOptions options;
};

LoadedProblem parse_problem(const json& doc);
LoadedProblem load_problem_file(const std::string& path);

/// Sampled operator-property checks (adjoint, monotone, lipschitz, moreau)
/// with a seeded RNG. Empty result means the file passes.
struct ValidationIssue {
    std::string property;  // "adjoint" | "monotone" | "lipschitz" | "moreau"
    std::string where;     // field path of the offending operator
    double worst;          // worst sampled defect
};

std::vector<ValidationIssue> validate_properties(const MinimizationSpec& spec,
                                                 std::uint64_t seed);

// ----- templates -------------------------------------------------------------

std::vector<std::string> template_names();           // 5 shipped templates
json template_json(const std::string& name);         // throws SchemaError on unknown name

// ----- solve orchestration ----------------------------------------------------

struct RunOverrides {
    std::optional<double> tol;
    std::optional<long> max_iter;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> inject;
    std::optional<double> gamma;
    long trace_every = 1;
};

struct RunResult {
    SolveReport report;
    ObjectiveReport objective;
    std::string trace_csv;  // header + one row per traced iteration
    json solution;          // final vectors + certificate block
};

RunResult run_problem(const LoadedProblem& problem, const RunOverrides& overrides);

/// Shortest-round-trip decimal for doubles ("%.17g"); "inf" for +infinity.
std::string format_real(double x);

}  // namespace pdsplit::io
