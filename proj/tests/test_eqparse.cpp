#include <doctest.h>

#include <cmath>
#include <random>

#include "cfde/eqparse.hpp"
#include "helpers.hpp"

using namespace cfde;

namespace {

const std::vector<std::string> kSources = {
    "T2 y + 4 T y + 3 y = exp(2 t^a)",
    "T2 y - 10 T y + 25 y = 0",
    "T2 y + T y + y = 0",
    "T2 y + 4 T y + 3 y = 2 t^(2 a) + t^a - 3",
    "T2 y + 4 T y + 3 y = sin(2 t^a)",
    "T2 y + 4 T y + 3 y = exp(2 t^a) t^a",
    "T2 y + 4 T y + 3 y = exp(-4 t^a)",
    "2 T3 y - T y = cos(0.5 * t^a) * exp(t^a) - (t^a)^3",
    "T y = -(t^a + 1)",
    "3 T y + y = 6",
    "T4 y - y = exp(t^a)*sin(3 t^a) + 2*cos(t^a)",
};

std::size_t error_offset(const std::string& src) {
    try {
        parse_equation(src);
    } catch (const ParseError& e) {
        return e.offset();
    }
    FAIL("expected a parse error for: " << src);
    return 0;
}

TExprPtr random_texpr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 8 : 4);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    std::uniform_int_distribution<int> k(1, 3);
    switch (pick(rng)) {
        case 0: return TExpr::num(std::round(c(rng) * 4) / 4);
        case 1: return TExpr::tpow(k(rng));
        case 2: return TExpr::func(TOp::Exp, c(rng));
        case 3: return TExpr::func(TOp::Sin, c(rng));
        case 4: return TExpr::func(TOp::Cos, c(rng));
        case 5: return TExpr::binary(TOp::Add, random_texpr(rng, depth - 1), random_texpr(rng, depth - 1));
        case 6: return TExpr::binary(TOp::Sub, random_texpr(rng, depth - 1), random_texpr(rng, depth - 1));
        case 7: return TExpr::binary(TOp::Mul, random_texpr(rng, depth - 1), random_texpr(rng, depth - 1));
        default: return TExpr::neg(random_texpr(rng, depth - 1));
    }
}

}  // namespace

TEST_SUITE("eqparse") {

TEST_CASE("parse the forced equation") {
    auto eq = parse_equation("T2 y + 4 T y + 3 y = exp(2 t^a)");
    REQUIRE(eq.lhs.size() == 3);
    CHECK(eq.lhs[0] == std::pair{2, 1.0});
    CHECK(eq.lhs[1] == std::pair{1, 4.0});
    CHECK(eq.lhs[2] == std::pair{0, 3.0});
    REQUIRE(eq.rhs);
    CHECK(*eq.rhs == *TExpr::func(TOp::Exp, 2.0));
    CHECK(eq.order() == 2);
}

TEST_CASE("parse a homogeneous equation") {
    auto eq = parse_equation("T2 y - 10 T y + 25 y = 0");
    REQUIRE(eq.lhs.size() == 3);
    CHECK(eq.lhs[1] == std::pair{1, -10.0});
    CHECK(eq.lhs[2] == std::pair{0, 25.0});
    CHECK_FALSE(eq.rhs);
}

TEST_CASE("leading coefficient is divided out") {
    auto eq = parse_equation("2 T y + 4 y = 6");
    CHECK(eq.lhs[0] == std::pair{1, 1.0});
    CHECK(eq.lhs[1] == std::pair{0, 2.0});
    auto p = to_problem(eq, SubstMap(0.5));
    CHECK(approx_equal(p.forcing, UExpr::constant(3.0)));
}

TEST_CASE("positioned errors") {
    CHECK(error_offset("T2 y + y + = 3") == 9);
    CHECK(error_offset("T2 y + 3 y") == 10);
    CHECK(error_offset("T2 y = log(t^a)") == 7);
    CHECK(error_offset("T2 y = t^b") == 9);
    CHECK(error_offset("T2 y = exp(2 t^a") == 16);
    CHECK(error_offset("T2 y = 3 $") == 9);
    CHECK(error_offset("3 y = 1") == 0);
    CHECK(error_offset("0 T y + y = 1") == 0);
    CHECK(error_offset("") == 0);
    try {
        parse_equation("T2 y = log(t^a)");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("exponential") != std::string::npos);
    }
}

TEST_CASE("never aborts on garbage") {
    std::mt19937_64 rng(1);
    const std::string alphabet = "Ty0123456789.+-*/=()^ at expsincol$";
    std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 30);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        for (int n = len(rng); n > 0; --n) s += alphabet[ch(rng)];
        try {
            parse_equation(s);
        } catch (const ParseError& e) {
            CHECK(e.offset() <= s.size());
        }
    }
}

TEST_CASE("render round trip") {
    for (const auto& src : kSources) {
        CAPTURE(src);
        const auto eq = parse_equation(src);
        const auto again = parse_equation(render_equation(eq));
        CHECK(again == eq);
    }
    CHECK(render_equation(parse_equation(kSources[0])) == kSources[0]);
}

TEST_CASE("lowering examples") {
    for (double al : {0.25, 0.5, 1.0}) {
        SubstMap s(al);
        auto e = lower_forcing(*TExpr::func(TOp::Exp, 2.0), s);
        CHECK(approx_equal(e, UExpr::exponential(2 * al)));

        auto eq = parse_equation("T y = 2 t^(2 a) + t^a - 3");
        auto poly = lower_forcing(*eq.rhs, s);
        CHECK(approx_equal(poly, canonicalize({make_term(2 * al * al, 2), make_term(al, 1),
                                               make_term(-3, 0)})));

        auto sn = lower_forcing(*TExpr::func(TOp::Sin, 2.0), s);
        CHECK(approx_equal(sn, UExpr::term(make_term(1, 0, 0, Trig::Sin, 2 * al))));
    }
}

TEST_CASE("lowering soundness against direct evaluation") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> tt(0.05, 3.0);
    std::uniform_real_distribution<double> al(0.1, 1.0);
    for (int i = 0; i < 500; ++i) {
        auto e = random_texpr(rng, 4);
        const double alpha = al(rng);
        const double t = tt(rng);
        SubstMap s(alpha);
        const UExpr low = lower_forcing(*e, s);
        const double direct = eval_texpr(*e, t, alpha);
        const double via = eval(low, t, s);
        const double mag = magnitude(low, t, s);
        CHECK(std::abs(via - direct) <= 1e-10 * std::max({1.0, std::abs(direct), mag}));
    }
}

}  // TEST_SUITE
