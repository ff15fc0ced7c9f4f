#pragma once

// JSON and text renderings of expressions, root sets and solutions.
// The JSON layout is documented in docs/json_format.md.

#include <string>

#include <json.hpp>

#include "cfde/chareq.hpp"
#include "cfde/solver.hpp"
#include "cfde/ualgebra.hpp"

namespace cfde {

using Json = nlohmann::json;

Json to_json(const UTerm& t);
Json to_json(const UExpr& f);
Json to_json(const RootSet& roots);

UExpr uexpr_from_json(const Json& j);

/// A solved problem as written by `cfde solve --json`.
struct SolutionDocument {
    ProblemSpec spec;
    GeneralSolution solution;
    std::string equation;  // source text, may be empty
};

Json to_json(const SolutionDocument& doc);

/// Throws std::invalid_argument on schema violations.
SolutionDocument solution_from_json(const Json& j);

std::string format_root(Complex r);

/// Multi-line human-readable report of a solved problem.
std::string render_text(const SolutionDocument& doc);

}  // namespace cfde
