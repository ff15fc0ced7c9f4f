#include "cfde/eqparse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cfde {

ParseError::ParseError(const std::string& message, std::size_t offset,
                       std::vector<std::string> expected)
    : Error([&] {
          std::ostringstream os;
          os << "parse error at offset " << offset << ": " << message;
          if (!expected.empty()) {
              os << " (expected ";
              for (std::size_t i = 0; i < expected.size(); ++i) {
                  os << (i ? ", " : "") << expected[i];
              }
              os << ")";
          }
          return os.str();
      }()),
      message_(message),
      offset_(offset),
      expected_(std::move(expected)) {}

namespace {

constexpr int kMaxTPower = 64;
constexpr int kMaxOrder = 20;
const char* const kClassNote =
    "forcing terms must stay in the exponential-polynomial-trigonometric class in t^a";

enum class Tok { Number, Ident, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    std::size_t offset = 0;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    i = j;
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                }
            }
            const std::string text(src.substr(start, i - start));
            double v = 0.0;
            auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
                throw ParseError("malformed number '" + text + "'", start, {"number"});
            }
            out.push_back({Tok::Number, text, v, start});
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                ++i;
            }
            out.push_back({Tok::Ident, std::string(src.substr(start, i - start)), 0.0, start});
        } else if (std::string_view("+-*^()=").find(c) != std::string_view::npos) {
            out.push_back({Tok::Sym, std::string(1, c), 0.0, start});
            ++i;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
    }
    out.push_back({Tok::End, "", 0.0, src.size()});
    return out;
}

bool is_deriv_ident(const std::string& s) {
    if (s.empty() || s[0] != 'T') return false;
    return std::all_of(s.begin() + 1, s.end(), [](char ch) {
        return std::isdigit(static_cast<unsigned char>(ch)) != 0;
    });
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    EquationAst equation() {
        std::map<int, double> orders;
        bool first = true;
        for (;;) {
            double sign = 1.0;
            if (is_sym("+") || is_sym("-")) {
                const Token& op = peek();
                sign = op.text == "-" ? -1.0 : 1.0;
                advance();
                if (!starts_term()) {
                    fail_at(op.offset, "dangling '" + op.text + "' with no term after it",
                            {"number", "T", "y"});
                }
            } else if (!first) {
                break;
            }
            first = false;
            const auto [order, coeff] = lhs_term();
            orders[order] += sign * coeff;
        }
        expect_sym("=", {"'+'", "'-'", "'='"});

        EquationAst eq;
        const int top = orders.rbegin()->first;
        const double lead = orders.rbegin()->second;
        if (top == 0) fail_at(0, "equation must contain at least one derivative T y", {});
        if (lead == 0.0) fail_at(0, "zero leading coefficient", {});
        for (auto it = orders.rbegin(); it != orders.rend(); ++it) {
            if (it->first != top && it->second == 0.0) continue;
            eq.lhs.emplace_back(it->first, it->second / lead);
        }

        TExprPtr rhs = expr();
        if (peek().kind != Tok::End) fail("unexpected trailing input", {"'+'", "'-'", "end of input"});
        if (rhs->op == TOp::Num && rhs->value == 0.0) rhs = nullptr;
        if (rhs && lead != 1.0) {
            const double s = 1.0 / lead;
            if (s == -1.0) {
                rhs = TExpr::neg(rhs);
            } else if (s > 0.0) {
                rhs = TExpr::binary(TOp::Mul, TExpr::num(s), rhs);
            } else {
                rhs = TExpr::neg(TExpr::binary(TOp::Mul, TExpr::num(-s), rhs));
            }
        }
        eq.rhs = std::move(rhs);
        return eq;
    }

private:
    bool starts_term() const {
        const Token& t = peek();
        return t.kind == Tok::Number ||
               (t.kind == Tok::Ident && (t.text == "y" || is_deriv_ident(t.text)));
    }

    std::pair<int, double> lhs_term() {
        double coeff = 1.0;
        bool have_coeff = false;
        if (peek().kind == Tok::Number) {
            coeff = peek().number;
            have_coeff = true;
            advance();
            if (is_sym("*")) advance();
        }
        int order = 0;
        if (peek().kind == Tok::Ident && is_deriv_ident(peek().text)) {
            const std::string& s = peek().text;
            if (s.size() > 3) fail("derivative order too large", {"T", "T<k>"});
            order = s.size() == 1 ? 1 : std::stoi(s.substr(1));
            if (order < 1) fail("derivative order must be at least 1", {"T", "T<k>"});
            if (order > kMaxOrder) fail("derivative order too large", {"T", "T<k>"});
            advance();
        }
        if (!(peek().kind == Tok::Ident && peek().text == "y")) {
            if (!have_coeff && order == 0) fail("expected a term", {"number", "T", "y"});
            fail("expected the unknown function", {"y"});
        }
        advance();
        return {order, coeff};
    }

    TExprPtr expr() {
        TExprPtr lhs = prod();
        while (is_sym("+") || is_sym("-")) {
            const TOp op = is_sym("+") ? TOp::Add : TOp::Sub;
            advance();
            lhs = TExpr::binary(op, lhs, prod());
        }
        return lhs;
    }

    bool starts_factor() const {
        const Token& t = peek();
        return t.kind == Tok::Number || t.kind == Tok::Ident || (t.kind == Tok::Sym && t.text == "(");
    }

    TExprPtr prod() {
        TExprPtr lhs = factor();
        for (;;) {
            if (is_sym("*")) {
                advance();
                lhs = TExpr::binary(TOp::Mul, lhs, factor());
            } else if (starts_factor()) {
                lhs = TExpr::binary(TOp::Mul, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    TExprPtr factor() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            advance();
            return TExpr::num(t.number);
        }
        if (is_sym("-")) {
            advance();
            return TExpr::neg(factor());
        }
        if (is_sym("(")) {
            const std::size_t open = t.offset;
            advance();
            TExprPtr inner = expr();
            expect_sym(")", {"')'"});
            if (is_sym("^")) {
                advance();
                const int k = integer();
                if (inner->op != TOp::TPow) {
                    fail_at(open, std::string("only (t^a)^k may be raised to a power; ") + kClassNote,
                            {});
                }
                return TExpr::tpow(inner->power * k);
            }
            return inner;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "t") return tpow();
            if (t.text == "exp" || t.text == "sin" || t.text == "cos") return func();
            if (t.text == "y" || is_deriv_ident(t.text)) {
                fail("the unknown y may only appear on the left-hand side", {});
            }
            if (peek(1).kind == Tok::Sym && peek(1).text == "(") {
                fail(std::string("unsupported function; ") + kClassNote, {"exp", "sin", "cos"});
            }
            fail("unknown symbol '" + t.text + "'", {"number", "t^a", "exp", "sin", "cos", "'('"});
        }
        fail("expected a factor", {"number", "t^a", "exp", "sin", "cos", "'('", "'-'"});
    }

    // t ^ a | t ^ ( k [*] a )
    TExprPtr tpow() {
        const std::size_t at = peek().offset;
        advance();
        if (!is_sym("^")) fail_at(at, std::string("bare t is not allowed; ") + kClassNote, {"'^'"});
        advance();
        if (is_ident("a")) {
            advance();
            return TExpr::tpow(1);
        }
        if (is_sym("(")) {
            advance();
            int k = 1;
            if (peek().kind == Tok::Number) {
                k = integer();
                if (is_sym("*")) advance();
            }
            if (!is_ident("a")) fail(std::string("powers of t must be integer multiples of a; ") + kClassNote, {"a"});
            advance();
            expect_sym(")", {"')'"});
            return TExpr::tpow(k);
        }
        fail(std::string("powers of t must be integer multiples of a; ") + kClassNote, {"a", "'('"});
    }

    TExprPtr func() {
        const std::string name = peek().text;
        advance();
        expect_sym("(", {"'('"});
        double c = 1.0;
        if (is_sym("-")) {
            c = -1.0;
            advance();
        }
        if (peek().kind == Tok::Number) {
            c *= peek().number;
            advance();
            if (is_sym("*")) advance();
        }
        if (!is_ident("t")) fail(std::string("function argument must be c·t^a; ") + kClassNote, {"t^a"});
        advance();
        expect_sym("^", {"'^'"});
        if (!is_ident("a")) fail(std::string("function argument must be c·t^a; ") + kClassNote, {"a"});
        advance();
        expect_sym(")", {"')'"});
        const TOp op = name == "exp" ? TOp::Exp : name == "sin" ? TOp::Sin : TOp::Cos;
        return TExpr::func(op, c);
    }

    int integer() {
        const Token& t = peek();
        if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
            fail("expected a positive integer", {"integer"});
        }
        const double v = t.number;
        if (v < 1.0 || v > 1e6) fail("integer out of range", {"integer"});
        advance();
        return static_cast<int>(v);
    }

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    bool is_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
    bool is_ident(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
    void expect_sym(const char* s, std::vector<std::string> expected) {
        if (!is_sym(s)) fail(std::string("expected '") + s + "'", std::move(expected));
        advance();
    }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", found " + found, t.offset, std::move(expected));
    }
    [[noreturn]] void fail_at(std::size_t offset, const std::string& msg,
                              std::vector<std::string> expected) const {
        throw ParseError(msg, offset, std::move(expected));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

bool is_additive(const TExpr& e) { return e.op == TOp::Add || e.op == TOp::Sub; }

std::string paren(const TExpr& e, bool wrap) {
    return wrap ? "(" + render_texpr(e) + ")" : render_texpr(e);
}

}  // namespace

TExprPtr TExpr::num(double v) { return std::make_shared<const TExpr>(TExpr{TOp::Num, v, 0, {}, {}}); }
TExprPtr TExpr::tpow(int k) { return std::make_shared<const TExpr>(TExpr{TOp::TPow, 0.0, k, {}, {}}); }
TExprPtr TExpr::func(TOp op, double c) {
    return std::make_shared<const TExpr>(TExpr{op, c, 0, {}, {}});
}
TExprPtr TExpr::binary(TOp op, TExprPtr l, TExprPtr r) {
    return std::make_shared<const TExpr>(TExpr{op, 0.0, 0, std::move(l), std::move(r)});
}
TExprPtr TExpr::neg(TExprPtr x) {
    return std::make_shared<const TExpr>(TExpr{TOp::Neg, 0.0, 0, std::move(x), {}});
}

bool operator==(const TExpr& a, const TExpr& b) {
    if (a.op != b.op || a.value != b.value || a.power != b.power) return false;
    auto same = [](const TExprPtr& x, const TExprPtr& y) {
        if (!x || !y) return !x && !y;
        return *x == *y;
    };
    return same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

bool operator==(const EquationAst& a, const EquationAst& b) {
    if (a.lhs != b.lhs) return false;
    if (!a.rhs || !b.rhs) return !a.rhs && !b.rhs;
    return *a.rhs == *b.rhs;
}

EquationAst parse_equation(std::string_view src) { return Parser(src).equation(); }

std::string render_texpr(const TExpr& e) {
    switch (e.op) {
        case TOp::Num: return format_real(e.value);
        case TOp::TPow: return e.power == 1 ? "t^a" : "t^(" + std::to_string(e.power) + " a)";
        case TOp::Exp:
        case TOp::Sin:
        case TOp::Cos: {
            const char* name = e.op == TOp::Exp ? "exp" : e.op == TOp::Sin ? "sin" : "cos";
            std::string arg;
            if (e.value == -1.0) arg = "-";
            else if (e.value != 1.0) arg = format_real(e.value) + " ";
            return std::string(name) + "(" + arg + "t^a)";
        }
        case TOp::Add: return render_texpr(*e.lhs) + " + " + paren(*e.rhs, is_additive(*e.rhs));
        case TOp::Sub: return render_texpr(*e.lhs) + " - " + paren(*e.rhs, is_additive(*e.rhs));
        case TOp::Mul:
            return paren(*e.lhs, is_additive(*e.lhs)) + " * " +
                   paren(*e.rhs, is_additive(*e.rhs) || e.rhs->op == TOp::Mul);
        case TOp::Neg:
            return "-" + paren(*e.lhs, is_additive(*e.lhs) || e.lhs->op == TOp::Mul);
    }
    return {};
}

std::string render_equation(const EquationAst& eq) {
    std::string out;
    bool first = true;
    for (const auto& [order, c] : eq.lhs) {
        std::string body;
        const double mag = std::abs(c);
        if (mag != 1.0) body = format_real(mag) + " ";
        if (order == 1) body += "T ";
        if (order > 1) body += "T" + std::to_string(order) + " ";
        body += "y";
        if (first) {
            out = (c < 0 ? "-" : "") + body;
            first = false;
        } else {
            out += (c < 0 ? " - " : " + ") + body;
        }
    }
    out += " = ";
    out += eq.rhs ? render_texpr(*eq.rhs) : "0";
    return out;
}

UExpr lower_forcing(const TExpr& e, const SubstMap& subst) {
    const double a = subst.alpha();
    switch (e.op) {
        case TOp::Num: return UExpr::constant(e.value);
        case TOp::TPow:
            if (e.power > kMaxTPower) {
                throw std::invalid_argument("t^(k a) with k = " + std::to_string(e.power) +
                                            " exceeds the supported maximum of 64");
            }
            return UExpr::u_power(e.power, std::pow(a, e.power));
        case TOp::Exp: return UExpr::exponential(e.value * a);
        case TOp::Sin: return UExpr::term(make_term(1.0, 0, 0.0, Trig::Sin, e.value * a));
        case TOp::Cos: return UExpr::term(make_term(1.0, 0, 0.0, Trig::Cos, e.value * a));
        case TOp::Add: return add(lower_forcing(*e.lhs, subst), lower_forcing(*e.rhs, subst));
        case TOp::Sub: return sub(lower_forcing(*e.lhs, subst), lower_forcing(*e.rhs, subst));
        case TOp::Mul: return mul(lower_forcing(*e.lhs, subst), lower_forcing(*e.rhs, subst));
        case TOp::Neg: return scale(lower_forcing(*e.lhs, subst), -1.0);
    }
    return {};
}

double eval_texpr(const TExpr& e, double t, double alpha) {
    switch (e.op) {
        case TOp::Num: return e.value;
        case TOp::TPow: return std::pow(t, e.power * alpha);
        case TOp::Exp: return std::exp(e.value * std::pow(t, alpha));
        case TOp::Sin: return std::sin(e.value * std::pow(t, alpha));
        case TOp::Cos: return std::cos(e.value * std::pow(t, alpha));
        case TOp::Add: return eval_texpr(*e.lhs, t, alpha) + eval_texpr(*e.rhs, t, alpha);
        case TOp::Sub: return eval_texpr(*e.lhs, t, alpha) - eval_texpr(*e.rhs, t, alpha);
        case TOp::Mul: return eval_texpr(*e.lhs, t, alpha) * eval_texpr(*e.rhs, t, alpha);
        case TOp::Neg: return -eval_texpr(*e.lhs, t, alpha);
    }
    return 0.0;
}

ProblemSpec to_problem(const EquationAst& eq, const SubstMap& subst) {
    const int n = eq.order();
    if (n < 1) throw std::invalid_argument("equation order must be at least 1");
    std::vector<double> coeffs(static_cast<std::size_t>(n), 0.0);
    for (const auto& [order, c] : eq.lhs) {
        if (order < n) coeffs[static_cast<std::size_t>(order)] = c;
    }
    UExpr q = eq.rhs ? lower_forcing(*eq.rhs, subst) : UExpr{};
    return ProblemSpec(std::move(coeffs), subst, std::move(q));
}

}  // namespace cfde
