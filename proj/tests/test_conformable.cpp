#include <doctest.h>

#include <cmath>
#include <random>

#include "cfde/conformable.hpp"
#include "helpers.hpp"

using namespace cfde;

TEST_SUITE("conformable") {

TEST_CASE("first derivative examples") {
    for (double al : {0.25, 0.5, 0.75, 1.0}) {
        GridFn e([al](double t) { return std::exp(std::pow(t, al) / al); }, 1e-6, 100.0);
        for (double t : {0.05, 0.5, 1.0, 2.5}) {
            const double want = std::exp(std::pow(t, al) / al);
            CHECK(std::abs(numeric_t_alpha_derivative(e, t, al) - want) <= 1e-5 * want);
        }
    }
    GridFn sq([](double t) { return t * t; }, 1e-6, 10.0);
    CHECK(numeric_t_alpha_derivative(sq, 1.0, 0.5) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(numeric_t_alpha_derivative(sq, 3.0, 0.5) ==
          doctest::Approx(2.0 * std::pow(3.0, 1.5)).epsilon(1e-5));
    GridFn seven([](double) { return 7.0; }, 1e-6, 10.0);
    CHECK(std::abs(numeric_t_alpha_derivative(seven, 2.0, 0.3)) < 1e-7);
}

TEST_CASE("domain guards") {
    GridFn f([](double t) { return t; }, 0.5, 2.0);
    CHECK_THROWS_AS(f(0.4), DomainError);
    CHECK_THROWS_AS(numeric_t_alpha_derivative(f, 1e-7, 0.5), DomainError);
    CHECK_THROWS_AS(numeric_t_alpha_derivative(f, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(numeric_t_alpha_derivative(f, 1.0, 0.5, -1), std::invalid_argument);
    CHECK(numeric_t_alpha_derivative(f, 1.0, 0.5, 0) == 1.0);
}

TEST_CASE("higher orders stay inside the domain near the grid floor") {
    const SubstMap s(0.25);
    auto f = UExpr::exponential(-1.0);
    auto g = grid_fn(f, s);
    for (int k = 1; k <= 5; ++k) {
        const double want = eval(diff_u(f, k), 0.01, s);
        CHECK(std::abs(numeric_t_alpha_derivative(g, 0.01, 0.25, k) - want) <= 1e-4 * std::abs(want));
    }
}

TEST_CASE("step halving reduces the central quotient error") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> tt(0.5, 2.0);
    std::uniform_real_distribution<double> al(0.3, 1.0);
    int improved = 0;
    const int total = 50;
    for (int i = 0; i < total; ++i) {
        auto f = test::random_uexpr(rng, 3);
        SubstMap s(al(rng));
        const double t = tt(rng);
        const double exact = eval(diff_u(f), t, s);
        auto g = grid_fn(f, s);
        const double e1 = std::abs(central_quotient(g, t, s.alpha(), 1e-2) - exact);
        const double e2 = std::abs(central_quotient(g, t, s.alpha(), 5e-3) - exact);
        if (e1 < 1e-12) {
            ++improved;  // already exact (e.g. linear in u)
            continue;
        }
        // second order: the ratio should be close to 4
        if (e2 < e1 && e1 / e2 > 3.0) ++improved;
    }
    CHECK(improved == total);
}

TEST_CASE("oracle agrees with diff_u on random expressions") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> tt(0.05, 3.0);
    std::uniform_real_distribution<double> al(0.2, 1.0);
    std::uniform_int_distribution<int> ord(1, 3);
    for (int i = 0; i < 200; ++i) {
        auto f = test::random_uexpr(rng, 3);
        SubstMap s(al(rng));
        const double t = tt(rng);
        const int k = ord(rng);
        const UExpr d = diff_u(f, k);
        const double num = numeric_t_alpha_derivative(grid_fn(f, s), t, s.alpha(), k);
        CHECK(std::abs(num - eval(d, t, s)) <= 1e-4 * std::max(1e-300, magnitude(d, t, s)));
    }
}

TEST_CASE("conformable integral examples") {
    GridFn one([](double) { return 1.0; }, 1e-6, 10.0);
    CHECK(numeric_conformable_integral(one, 1.0, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double al : {0.2, 0.5, 0.9}) {
        GridFn w([al](double x) { return std::pow(x, 1.0 - al); }, 1e-6, 10.0);
        CHECK(numeric_conformable_integral(w, 1.0, 3.0, al) == doctest::Approx(2.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(numeric_conformable_integral(one, 0.0, 2.0, 0.5), DomainError);
    CHECK_THROWS_AS(numeric_conformable_integral(one, 2.0, 1.0, 0.5), DomainError);
}

TEST_CASE("adaptive simpson reports failure with an estimate") {
    SimpsonOptions strict;
    strict.max_depth = 2;
    strict.abs_tol = 1e-15;
    strict.rel_tol = 1e-15;
    auto wiggle = [](double x) { return std::sin(50.0 * x); };
    bool threw = false;
    try {
        adaptive_simpson(wiggle, 0.0, 3.0, strict);
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(std::isfinite(e.estimate()));
    }
    CHECK(threw);
    CHECK(adaptive_simpson(wiggle, 0.0, 3.0) ==
          doctest::Approx((1.0 - std::cos(150.0)) / 50.0).epsilon(1e-9));
}

TEST_CASE("derivative of the integral returns the integrand") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    std::uniform_real_distribution<double> al(0.2, 1.0);
    std::uniform_real_distribution<double> tt(0.6, 2.5);
    for (int i = 0; i < 60; ++i) {
        const double c0 = c(rng), c1 = c(rng), c2 = c(rng), c3 = c(rng);
        auto poly = [=](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); };
        const double alpha = al(rng);
        const double a = 0.5;
        const double t = tt(rng);
        GridFn f(poly, 1e-6, 10.0);
        GridFn big_i([&](double x) { return numeric_conformable_integral(f, a, x, alpha); }, a, 10.0);
        const double got = numeric_t_alpha_derivative(big_i, t, alpha);
        CHECK(std::abs(got - poly(t)) <= 1e-4 * std::max(1.0, std::abs(poly(t))));
    }
}

TEST_CASE("integration by parts defect") {
    const auto u = UExpr::u_power(1);
    const auto eu = UExpr::exponential(1.0);
    CHECK(integration_by_parts_check(u, eu, 1.0, 2.0, 1.0) < 1e-8);
    CHECK(integration_by_parts_check(UExpr::constant(3.0), eu, 1.0, 2.0, 0.5) < 1e-8);
    const auto s = UExpr::term(make_term(1, 0, 0, Trig::Sin, 2.0));
    const auto e = UExpr::exponential(-0.7, 2.0);
    CHECK(integration_by_parts_check(s, e, 0.5, 2.0, 0.5) < 1e-6);
}

}  // TEST_SUITE
