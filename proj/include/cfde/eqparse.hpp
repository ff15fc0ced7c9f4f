#pragma once

// Equation DSL:
//
//   equation  := lhs "=" rhs
//   lhs       := term { ("+"|"-") term }
//   term      := [number] [deriv] "y"
//   deriv     := "T" [integer]
//   rhs       := "0" | expr
//   expr      := prod { ("+"|"-") prod }
//   prod      := factor { ["*"] factor }
//   factor    := number | tpow | func | "(" expr ")" | "-" factor
//   tpow      := "t^a" | "t^(" integer " a)" | "(t^a)^" integer
//   func      := ("exp"|"sin"|"cos") "(" [number ["*"]] "t^a" ")"
//
// "a" stands for the fractional order, which is bound separately.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfde/errors.hpp"
#include "cfde/solver.hpp"
#include "cfde/ualgebra.hpp"

namespace cfde {

enum class TOp { Num, TPow, Exp, Sin, Cos, Add, Sub, Mul, Neg };

struct TExpr;
using TExprPtr = std::shared_ptr<const TExpr>;

/// Immutable node of the forcing-term syntax tree.
struct TExpr {
    TOp op;
    double value = 0.0;  // Num: literal; Exp/Sin/Cos: c in f(c t^a)
    int power = 0;       // TPow: k in t^{k a}
    TExprPtr lhs;
    TExprPtr rhs;  // unused for unary nodes

    static TExprPtr num(double v);
    static TExprPtr tpow(int k);
    static TExprPtr func(TOp op, double c);
    static TExprPtr binary(TOp op, TExprPtr l, TExprPtr r);
    static TExprPtr neg(TExprPtr x);
};

bool operator==(const TExpr& a, const TExpr& b);

struct EquationAst {
    // (derivative order, coefficient), strictly decreasing in order; the
    // first entry is the leading term with coefficient 1 after parsing.
    std::vector<std::pair<int, double>> lhs;
    TExprPtr rhs;  // null for a homogeneous equation

    int order() const noexcept { return lhs.empty() ? 0 : lhs.front().first; }
};

bool operator==(const EquationAst& a, const EquationAst& b);

/// Recursive-descent parse; the result is divided through by the leading
/// coefficient. Throws ParseError carrying a byte offset.
EquationAst parse_equation(std::string_view src);

/// Source text that parses back to an identical EquationAst.
std::string render_equation(const EquationAst& eq);
std::string render_texpr(const TExpr& e);

/// t^{ka} -> (a u)^k, e^{c t^a} -> e^{c a u}, sin/cos(c t^a) -> sin/cos(c a u).
UExpr lower_forcing(const TExpr& e, const SubstMap& subst);

/// Direct evaluation in t, independent of the u-algebra.
double eval_texpr(const TExpr& e, double t, double alpha);

ProblemSpec to_problem(const EquationAst& eq, const SubstMap& subst);

}  // namespace cfde
