#include "cfde/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "cfde/conformable.hpp"
#include "cfde/eqparse.hpp"

namespace cfde::cli {

namespace {

double to_real(const std::string& s, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("malformed ") + what + " '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Options {
    std::optional<double> alpha;
    std::string alpha_list;
    bool json = false;
    std::string ic;
    std::string range;
    std::optional<double> tol;
    std::string columns = "basic";
    std::string file;
    std::string constants;
    std::string equation;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--alpha", o.alpha, "fractional order in (0, 1]");
    sub->add_option("--alpha-list", o.alpha_list, "comma-separated orders, solved independently");
    sub->add_flag("--json", o.json, "machine-readable output");
    sub->add_option("--ic", o.ic, "initial conditions t0:v0,v1,... for the sequential derivatives");
    sub->add_option("--constants", o.constants, "explicit constants c1,c2,...");
    sub->add_option("--range", o.range, "lo:hi:n sampling / verification grid");
    sub->add_option("--tol", o.tol, "relative residual tolerance for verify");
    sub->add_option("--columns", o.columns, "basic or full CSV columns")
        ->check(CLI::IsMember({"basic", "full"}));
    sub->add_option("--file", o.file, "read the equation or a solve --json document from a file ('-' for stdin)");
    sub->add_option("equation", o.equation, "equation source, e.g. \"T2 y + 4 T y + 3 y = exp(2 t^a)\"");
}

struct Failure {
    int code;
    std::string kind;
    std::string message;
    const ParseError* parse = nullptr;
};

void report_failure(const Failure& f, bool json, std::ostream& err) {
    if (json) {
        Json e{{"kind", f.kind}, {"message", f.message}, {"exit_code", f.code}};
        if (f.parse) {
            e["offset"] = f.parse->offset();
            e["expected"] = f.parse->expected();
        }
        err << Json{{"error", e}}.dump() << "\n";
    } else {
        err << "error: " << f.message << "\n";
    }
}

std::string read_source(const Options& o, std::istream& in) {
    if (!o.file.empty() && !o.equation.empty()) {
        throw std::invalid_argument("give the equation either positionally or with --file, not both");
    }
    if (!o.file.empty()) {
        std::ostringstream ss;
        if (o.file == "-") {
            ss << in.rdbuf();
        } else {
            std::ifstream f(o.file);
            if (!f) throw std::invalid_argument("cannot open '" + o.file + "'");
            ss << f.rdbuf();
        }
        return ss.str();
    }
    if (o.equation == "-") {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    if (o.equation.empty()) throw std::invalid_argument("no equation given");
    return o.equation;
}

void apply_constants(SolutionDocument& doc, const Options& o) {
    if (!o.ic.empty() && !o.constants.empty()) {
        throw std::invalid_argument("--ic and --constants are mutually exclusive");
    }
    if (!o.ic.empty()) {
        const auto ic = parse_ic(o.ic);
        doc.solution.constants = fit_constants(doc.solution, ic.t0, ic.values, doc.spec.subst);
    } else if (!o.constants.empty()) {
        auto c = parse_real_list(o.constants);
        if (static_cast<int>(c.size()) != doc.spec.order()) {
            throw std::invalid_argument("--constants needs " + std::to_string(doc.spec.order()) +
                                        " values");
        }
        doc.solution.constants = std::move(c);
    }
}

std::vector<SolutionDocument> build_documents(const Options& o, std::istream& in) {
    const std::string source = trim(read_source(o, in));
    if (!source.empty() && source.front() == '{') {
        if (!o.alpha_list.empty()) throw std::invalid_argument("--alpha-list cannot be used with a solution document");
        SolutionDocument doc = solution_from_json(Json::parse(source));
        if (o.alpha && *o.alpha != doc.spec.alpha()) {
            throw std::invalid_argument("--alpha disagrees with the document's alpha");
        }
        apply_constants(doc, o);
        return {std::move(doc)};
    }

    std::vector<double> alphas;
    if (o.alpha && !o.alpha_list.empty()) throw std::invalid_argument("use --alpha or --alpha-list, not both");
    if (o.alpha) alphas.push_back(*o.alpha);
    if (!o.alpha_list.empty()) alphas = parse_real_list(o.alpha_list);
    if (alphas.empty()) throw std::invalid_argument("--alpha is required");
    std::vector<SubstMap> substs;
    for (double a : alphas) substs.emplace_back(a);

    const EquationAst eq = parse_equation(source);
    const std::string canonical = render_equation(eq);

    auto solve_one = [&](const SubstMap& s) {
        ProblemSpec spec = to_problem(eq, s);
        GeneralSolution g = solve(spec);
        SolutionDocument doc{std::move(spec), std::move(g), canonical};
        apply_constants(doc, o);
        return doc;
    };
    if (substs.size() == 1) return {solve_one(substs.front())};

    std::vector<std::future<SolutionDocument>> jobs;
    for (const auto& s : substs) jobs.push_back(std::async(std::launch::async, solve_one, s));
    std::vector<SolutionDocument> docs;
    for (auto& j : jobs) docs.push_back(j.get());
    return docs;
}

int cmd_solve(const std::vector<SolutionDocument>& docs, const Options& o, std::ostream& out) {
    if (o.json) {
        if (docs.size() == 1) {
            out << to_json(docs.front()).dump(2) << "\n";
        } else {
            Json arr = Json::array();
            for (const auto& d : docs) arr.push_back(to_json(d));
            out << arr.dump(2) << "\n";
        }
        return kOk;
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out << "\n";
        out << render_text(docs[i]);
    }
    return kOk;
}

int cmd_verify(const std::vector<SolutionDocument>& docs, const Options& o, std::ostream& out,
               std::ostream& err) {
    double lo = kGridFloor;
    double hi = kDefaultGridHi;
    int count = kDefaultGridCount;
    if (!o.range.empty()) {
        const Range r = parse_range(o.range);
        lo = std::max(kGridFloor, r.lo);
        hi = r.hi;
        count = r.count;
    }
    const double tol = o.tol.value_or(kDefaultTolerance);
    if (!(tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    if (!(hi > lo)) throw std::invalid_argument("verification grid is empty");

    std::vector<VerificationReport> reports;
    for (const auto& d : docs) reports.push_back(verify_solution(d, lo, hi, count, tol));
    const bool pass = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });

    if (o.json) {
        if (reports.size() == 1) {
            out << report_to_json(reports.front()).dump(2) << "\n";
        } else {
            Json arr = Json::array();
            for (const auto& r : reports) arr.push_back(report_to_json(r));
            out << arr.dump(2) << "\n";
        }
    } else {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (i > 0) out << "\n";
            out << render_report_text(reports[i]);
        }
    }
    if (!pass) {
        for (const auto& r : reports) {
            for (const auto& c : r.components) {
                if (!(c.max_residual <= r.tolerance)) {
                    err << "verification failed (alpha " << format_real(r.alpha) << "): " << c.name
                        << " residual " << format_real(c.max_residual) << " at t = "
                        << format_real(c.worst_t) << "\n";
                }
            }
        }
        return kVerificationFailure;
    }
    return kOk;
}

int cmd_sample(const std::vector<SolutionDocument>& docs, const Options& o, std::ostream& out) {
    if (o.range.empty()) throw std::invalid_argument("sample needs --range lo:hi:n");
    if (docs.size() != 1) throw std::invalid_argument("sample takes a single alpha");
    out << sample_csv(docs.front(), parse_range(o.range), o.columns == "full");
    return kOk;
}

}  // namespace

Range parse_range(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("--range must look like lo:hi:n");
    Range r{to_real(parts[0], "range bound"), to_real(parts[1], "range bound"), 0};
    const double n = to_real(parts[2], "sample count");
    if (n != std::floor(n) || n < 2 || n > 1e7) {
        throw std::invalid_argument("sample count must be an integer >= 2");
    }
    r.count = static_cast<int>(n);
    if (!(r.lo > 0.0)) throw std::invalid_argument("range lower bound must be > 0");
    if (!(r.hi > r.lo)) throw std::invalid_argument("range upper bound must exceed the lower bound");
    return r;
}

InitialConditions parse_ic(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--ic must look like t0:v0,v1,...");
    InitialConditions ic{to_real(text.substr(0, colon), "initial point"),
                         parse_real_list(text.substr(colon + 1))};
    if (!(ic.t0 > 0.0)) throw std::invalid_argument("initial point must satisfy t0 > 0");
    return ic;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split(text, ',')) out.push_back(to_real(trim(p), "number"));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

double relative_residual(const ProblemSpec& spec, const UExpr& y, const UExpr& q, double t) {
    const SubstMap& s = spec.subst;
    const GridFn f = grid_fn(y, s, kDomainFloor, 2.0 * t + 1.0);
    const double qt = eval(q, t, s);
    double lhs = 0.0;
    double scale = std::abs(qt);
    for (int k = 0; k <= spec.order(); ++k) {
        const double p = k == spec.order() ? 1.0 : spec.coeffs[std::size_t(k)];
        if (p == 0.0) continue;
        const double d = numeric_t_alpha_derivative(f, t, s.alpha(), k);
        lhs += p * d;
        scale += std::abs(p * d);
    }
    const double r = std::abs(lhs - qt);
    if (scale == 0.0) return r;
    return r / scale;
}

VerificationReport verify_solution(const SolutionDocument& doc, double t_lo, double t_hi, int count,
                                   double tolerance) {
    if (!(t_lo >= kDomainFloor && t_hi > t_lo) || count < 2) {
        throw std::invalid_argument("invalid verification grid");
    }
    VerificationReport rep;
    rep.alpha = doc.spec.alpha();
    rep.tolerance = tolerance;
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    rep.count = count;

    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        grid[std::size_t(i)] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (count - 1));
    }
    grid.back() = t_hi;

    auto check = [&](std::string name, const UExpr& y, const UExpr& q) {
        ComponentResidual c{std::move(name), 0.0, grid.front()};
        for (double t : grid) {
            const double r = relative_residual(doc.spec, y, q, t);
            if (!(r <= c.max_residual)) {
                c.max_residual = r;
                c.worst_t = t;
            }
        }
        rep.pass = rep.pass && c.max_residual <= tolerance;
        rep.components.push_back(std::move(c));
    };

    const auto& g = doc.solution;
    for (int i = 0; i < g.basis.size(); ++i) {
        check("y" + std::to_string(i + 1), g.basis.elements[std::size_t(i)], UExpr{});
    }
    if (g.particular) check("v", *g.particular, doc.spec.forcing);
    if (g.constants) check("y", g.combined(), doc.spec.forcing);
    return rep;
}

std::string render_report_text(const VerificationReport& r) {
    std::ostringstream os;
    os << "verify alpha=" << format_real(r.alpha) << " grid=" << r.count << " log-spaced points in ["
       << format_real(r.t_lo) << ", " << format_real(r.t_hi) << "] tol=" << format_real(r.tolerance)
       << "\n";
    for (const auto& c : r.components) {
        os << "  " << c.name << ": max relative residual " << format_real(c.max_residual)
           << " at t=" << format_real(c.worst_t) << (c.max_residual <= r.tolerance ? "" : "  FAIL")
           << "\n";
    }
    os << "result: " << (r.pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

Json report_to_json(const VerificationReport& r) {
    Json comps = Json::array();
    for (const auto& c : r.components) {
        comps.push_back({{"name", c.name}, {"max_residual", c.max_residual}, {"worst_t", c.worst_t}});
    }
    return Json{{"alpha", r.alpha},
                {"tolerance", r.tolerance},
                {"grid", {{"lo", r.t_lo}, {"hi", r.t_hi}, {"count", r.count}, {"spacing", "log"}}},
                {"components", comps},
                {"pass", r.pass}};
}

std::string sample_csv(const SolutionDocument& doc, const Range& range, bool full_columns) {
    const auto& g = doc.solution;
    const SubstMap& s = doc.spec.subst;
    const UExpr y = g.combined();
    std::ostringstream os;
    os << "t,y";
    if (full_columns) {
        for (int i = 0; i < g.basis.size(); ++i) os << ",y_basis_" << i + 1;
        os << ",y_particular";
    }
    os << "\n";
    for (int i = 0; i < range.count; ++i) {
        const double t = i == range.count - 1
                             ? range.hi
                             : range.lo + (range.hi - range.lo) * static_cast<double>(i) / (range.count - 1);
        os << format_real(t) << "," << format_real(eval(y, t, s));
        if (full_columns) {
            for (const auto& b : g.basis.elements) os << "," << format_real(eval(b, t, s));
            os << "," << format_real(g.particular ? eval(*g.particular, t, s) : 0.0);
        }
        os << "\n";
    }
    return os.str();
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"Closed-form solver for sequential linear conformable fractional ODEs", "cfde"};
    app.require_subcommand(1);
    Options o;
    auto* solve_cmd = app.add_subcommand("solve", "print the general solution");
    auto* verify_cmd = app.add_subcommand("verify", "check a solution against the numeric oracle");
    auto* sample_cmd = app.add_subcommand("sample", "evaluate a solution on a grid as CSV");
    for (auto* sub : {solve_cmd, verify_cmd, sample_cmd}) add_common(sub, o);

    std::vector<const char*> argv{"cfde"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const auto docs = build_documents(o, in);
        if (solve_cmd->parsed()) return cmd_solve(docs, o, out);
        if (verify_cmd->parsed()) return cmd_verify(docs, o, out, err);
        return cmd_sample(docs, o, out);
    } catch (const ParseError& e) {
        report_failure({kUsage, "parse", e.what(), &e}, o.json, err);
        return kUsage;
    } catch (const RootFindingError& e) {
        report_failure({kSolverFailure, "solver", e.what()}, o.json, err);
        return kSolverFailure;
    } catch (const WronskianError& e) {
        report_failure({kSolverFailure, "solver", e.what()}, o.json, err);
        return kSolverFailure;
    } catch (const SingularMatrixError& e) {
        report_failure({kSolverFailure, "solver", e.what()}, o.json, err);
        return kSolverFailure;
    } catch (const Json::exception& e) {
        report_failure({kUsage, "usage", std::string("invalid solution document: ") + e.what()}, o.json, err);
        return kUsage;
    } catch (const std::exception& e) {
        report_failure({kUsage, "usage", e.what()}, o.json, err);
        return kUsage;
    }
}

}  // namespace cfde::cli
