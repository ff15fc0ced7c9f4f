#pragma once

// Command-line front end: `cfde solve | verify | sample`.
//
// Exit codes: 0 ok, 1 usage or parse error, 2 solver failure,
// 3 verification failure.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfde/render.hpp"

namespace cfde::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSolverFailure = 2, kVerificationFailure = 3 };

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

struct InitialConditions {
    double t0 = 0.0;
    std::vector<double> values;
};

/// "lo:hi:n"
Range parse_range(const std::string& text);
/// "t0:v0,v1,..."
InitialConditions parse_ic(const std::string& text);
/// "x,y,z"
std::vector<double> parse_real_list(const std::string& text);

struct ComponentResidual {
    std::string name;
    double max_residual = 0.0;
    double worst_t = 0.0;
};

struct VerificationReport {
    double alpha = 1.0;
    double tolerance = 1e-6;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int count = 0;
    std::vector<ComponentResidual> components;
    bool pass = true;
};

inline constexpr double kDefaultTolerance = 1e-6;
inline constexpr double kGridFloor = 0.01;
inline constexpr double kDefaultGridHi = 3.0;
inline constexpr int kDefaultGridCount = 50;

/// Relative residual of L[y] - q, with every conformable derivative taken
/// by the numeric oracle. Relative to sum_k |p_k kT y(t)| + |q(t)|.
double relative_residual(const ProblemSpec& spec, const UExpr& y, const UExpr& q, double t);

/// Residuals of each basis element, the particular solution, and (when
/// constants are present) the assembled solution over a log-spaced grid.
VerificationReport verify_solution(const SolutionDocument& doc, double t_lo, double t_hi,
                                   int count, double tolerance);

std::string render_report_text(const VerificationReport& r);
Json report_to_json(const VerificationReport& r);

/// CSV with header `t,y` (plus basis and particular columns when full).
std::string sample_csv(const SolutionDocument& doc, const Range& range, bool full_columns);

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace cfde::cli
