#include <doctest.h>

#include <cmath>
#include <random>

#include "cfde/conformable.hpp"
#include "cfde/solver.hpp"
#include "helpers.hpp"

using namespace cfde;

namespace {

const double kH = std::sqrt(3.0) / 2.0;

UExpr term(double c, int k, double a, Trig tr = Trig::None, double b = 0.0) {
    return UExpr::term(make_term(c, k, a, tr, b));
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("apply_operator annihilates roots") {
    ProblemSpec a({3, 4}, SubstMap(0.5));
    CHECK(apply_operator(a, UExpr::exponential(-3.0)).is_zero());
    CHECK(apply_operator(a, UExpr::exponential(-1.0)).is_zero());
    ProblemSpec b({25, -10}, SubstMap(0.5));
    CHECK(apply_operator(b, term(1, 1, 5.0)).is_zero());
    // non-root: eigenvalue P(2) = 15
    CHECK(approx_equal(apply_operator(a, UExpr::exponential(2.0)), UExpr::exponential(2.0, 15.0)));
}

TEST_CASE("homogeneous bases") {
    auto b1 = homogeneous_basis(ProblemSpec({3, 4}, SubstMap(1.0)));
    REQUIRE(b1.size() == 2);
    CHECK(b1.elements[0] == UExpr::exponential(-3.0));
    CHECK(b1.elements[1] == UExpr::exponential(-1.0));

    auto b2 = homogeneous_basis(ProblemSpec({25, -10}, SubstMap(0.5)));
    REQUIRE(b2.size() == 2);
    CHECK(approx_equal(b2.elements[0], UExpr::exponential(5.0), 1e-12));
    CHECK(approx_equal(b2.elements[1], term(1, 1, 5.0), 1e-12));
    CHECK(b2.provenance[1].power == 1);
    CHECK(b2.provenance[1].multiplicity == 2);

    auto b3 = homogeneous_basis(ProblemSpec({1, 1}, SubstMap(0.25)));
    REQUIRE(b3.size() == 2);
    CHECK(approx_equal(b3.elements[0], term(1, 0, -0.5, Trig::Cos, kH), 1e-12));
    CHECK(approx_equal(b3.elements[1], term(1, 0, -0.5, Trig::Sin, kH), 1e-12));
    CHECK(b3.provenance[0].kind == BasisKind::CosPartner);
    CHECK(b3.provenance[1].kind == BasisKind::SinPartner);
}

TEST_CASE("derivative matrix") {
    auto b = homogeneous_basis(ProblemSpec({3, 4}, SubstMap(1.0)));
    auto m = derivative_matrix(b);
    CHECK(m(0, 0) == UExpr::exponential(-3.0));
    CHECK(m(1, 0) == UExpr::exponential(-3.0, -3.0));
    CHECK(m(1, 1) == UExpr::exponential(-1.0, -1.0));

    auto b2 = homogeneous_basis(ProblemSpec({25, -10}, SubstMap(1.0)));
    auto m2 = derivative_matrix(b2);
    CHECK(approx_equal(m2(1, 0), UExpr::exponential(5.0, 5.0), 1e-12));
    CHECK(approx_equal(m2(1, 1), UExpr::exponential(5.0) + term(5, 1, 5.0), 1e-12));
}

TEST_CASE("wronskians") {
    auto w1 = wronskian(homogeneous_basis(ProblemSpec({3, 4}, SubstMap(1.0))));
    CHECK(w1.coeff == doctest::Approx(2.0));
    CHECK(w1.erate == doctest::Approx(-4.0));
    auto w2 = wronskian(homogeneous_basis(ProblemSpec({25, -10}, SubstMap(1.0))));
    CHECK(w2.coeff == doctest::Approx(1.0));
    CHECK(w2.erate == doctest::Approx(10.0));
    auto w3 = wronskian(homogeneous_basis(ProblemSpec({1, 1}, SubstMap(1.0))));
    CHECK(w3.coeff == doctest::Approx(kH));
    CHECK(w3.erate == doctest::Approx(-1.0));
    CHECK(w3.upow == 0);
    CHECK(w3.trig == Trig::None);

    SolutionBasis bad;
    bad.elements = {UExpr::exponential(1.0), term(1, 0, 0, Trig::Cos, 1.0)};
    CHECK_THROWS_AS(wronskian(bad), WronskianError);
}

TEST_CASE("determinant of a 3x3 numeric matrix") {
    UMatrix m(3, 3);
    const double a[3][3] = {{2, -1, 0}, {1, 3, 4}, {0, 5, -2}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(i, j) = UExpr::constant(a[i][j]);
    }
    // 2(-6-20) + 1(-2-0) = -54
    auto d = determinant(m);
    CHECK(coefficient(d, 0, 0.0) == doctest::Approx(-54.0));
}

TEST_CASE("variation of parameters for exp forcing") {
    const double al = 0.5;
    ProblemSpec spec({3, 4}, SubstMap(al), UExpr::exponential(2 * al));
    auto basis = homogeneous_basis(spec);
    auto ps = particular_solution(spec, basis);
    REQUIRE(ps.v.size() == 1);
    CHECK(test::rel_close(ps.v.terms()[0].coeff, 1.0 / (4 * al * al + 8 * al + 3), 1e-12));
    // c1' = -(1/2) e^{(2a+3)u}
    REQUIRE(ps.cprimes.size() == 2);
    CHECK(approx_equal(ps.cprimes[0], UExpr::exponential(2 * al + 3, -0.5), 1e-12));

    // Intermediate condition sum c_i' y_i = 0 and last row equals q.
    auto m = derivative_matrix(basis);
    UExpr row0, row1;
    for (int j = 0; j < 2; ++j) {
        row0 = row0 + ps.cprimes[std::size_t(j)] * m(0, j);
        row1 = row1 + ps.cprimes[std::size_t(j)] * m(1, j);
    }
    CHECK(row0.is_zero());
    CHECK(approx_equal(row1, spec.forcing, 1e-12));

    CHECK_THROWS_AS(particular_solution(ProblemSpec({3, 4}, SubstMap(al)), basis), std::invalid_argument);
}

TEST_CASE("resonant forcing produces polynomial growth") {
    const double al = 0.75;
    ProblemSpec spec({3, 4}, SubstMap(al), UExpr::exponential(-4 * al));
    auto g = solve(spec);
    REQUIRE(g.particular);
    CHECK(coefficient(*g.particular, 1, -3.0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(apply_operator(spec, *g.particular) - spec.forcing == UExpr{});
}

TEST_CASE("fit_constants") {
    auto g = solve(ProblemSpec({3, 4}, SubstMap(1.0)));
    const double e3 = std::exp(-3.0), e1 = std::exp(-1.0);
    const std::vector<double> targets{e3 + e1, -3 * e3 - e1};
    auto c = fit_constants(g, 1.0, targets, SubstMap(1.0));
    REQUIRE(c.size() == 2);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-12));

    auto z = fit_constants(g, 0.7, std::vector<double>{0.0, 0.0}, SubstMap(1.0));
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);

    auto g1 = solve(ProblemSpec({1}, SubstMap(0.5)));
    CHECK(fit_constants(g1, 2.0, std::vector<double>{0.0}, SubstMap(0.5))[0] == 0.0);

    CHECK_THROWS_AS(fit_constants(g, 0.0, targets, SubstMap(1.0)), DomainError);
    CHECK_THROWS_AS(fit_constants(g, 1.0, std::vector<double>{1.0}, SubstMap(1.0)), std::invalid_argument);

    GeneralSolution singular;
    singular.basis.elements = {UExpr::exponential(1.0), UExpr::exponential(1.0, 2.0)};
    CHECK_THROWS_AS(fit_constants(singular, 1.0, targets, SubstMap(1.0)), SingularMatrixError);
}

TEST_CASE("fit_constants accounts for the particular solution") {
    const SubstMap s(0.5);
    auto g = solve(ProblemSpec({3, 4}, s, UExpr::exponential(1.0)));
    const std::vector<double> want{0.3, -1.2};
    g.constants = want;
    const UExpr y = g.combined();
    const double t0 = 0.8;
    const std::vector<double> targets{eval(y, t0, s), eval(diff_u(y), t0, s)};
    g.constants.reset();
    auto c = fit_constants(g, t0, targets, s);
    CHECK(c[0] == doctest::Approx(want[0]).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(want[1]).epsilon(1e-10));
}

TEST_CASE("eigen-identity over random specs") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> order(1, 6);
    std::uniform_real_distribution<double> rr(-3.0, 3.0);
    for (int i = 0; i < 250; ++i) {
        auto p = test::random_coeffs(rng, order(rng), 5.0);
        ProblemSpec spec(std::move(p), SubstMap(1.0));
        const double r = rr(rng);
        const double pr = eval_poly(CharPoly(spec.coeffs), r).real();
        auto out = apply_operator(spec, UExpr::exponential(r));
        if (out.is_zero()) {
            CHECK(std::abs(pr) < 1e-10);
            continue;
        }
        REQUIRE(out.size() == 1);
        CHECK(out.terms()[0].erate == r);
        CHECK(std::abs(out.terms()[0].coeff - pr) <= 1e-10 * std::max(1.0, std::abs(pr)));
    }
}

TEST_CASE("annihilation and basis count over random specs") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> order(1, 5);
    std::uniform_real_distribution<double> al(0.2, 1.0);
    std::uniform_real_distribution<double> tt(0.1, 3.0);
    for (int i = 0; i < 60; ++i) {
        auto p = test::random_coeffs(rng, order(rng), 5.0);
        const double alpha = al(rng);
        ProblemSpec spec(std::move(p), SubstMap(alpha));
        auto basis = homogeneous_basis(spec);
        REQUIRE(basis.size() == spec.order());
        const UTerm w = wronskian(basis);
        CHECK(std::abs(w.erate + spec.coeffs.back()) < 1e-8 * std::max(1.0, std::abs(w.erate)));
        for (const auto& e : basis.elements) {
            CHECK(apply_operator(spec, e).is_zero());
            const GridFn f = grid_fn(e, spec.subst);
            for (int k = 0; k < 10; ++k) {
                const double t = tt(rng);
                double res = 0.0;
                double mag = 0.0;
                for (int j = 0; j <= spec.order(); ++j) {
                    const double p = j == spec.order() ? 1.0 : spec.coeffs[std::size_t(j)];
                    const double d = numeric_t_alpha_derivative(f, t, spec.alpha(), j);
                    res += p * d;
                    mag += std::abs(p * d);
                }
                // Measured against the size of the individual operator terms:
                // the basis elements grow like e^{15u} on this range.
                CHECK_MESSAGE(std::abs(res) < 1e-5 * std::max(1.0, mag),
                              "alpha=" << spec.alpha() << " t=" << t << " e=" << to_u_string(e)
                                       << " p=" << test::format_list(spec.coeffs));
            }
        }
    }
}

TEST_CASE("particular residual over random specs and forcings") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> al(0.25, 1.0);
    for (int i = 0; i < 100; ++i) {
        auto p = test::lattice_coeffs(rng, 4);
        const double alpha = al(rng);
        auto q = test::random_uexpr(rng, 3);
        ProblemSpec spec(std::move(p), SubstMap(alpha), std::move(q));
        if (spec.forcing.is_zero()) continue;
        auto g = solve(spec);
        REQUIRE(g.particular);
        CHECK(approx_equal(apply_operator(spec, *g.particular), spec.forcing, 1e-8));
    }
}

TEST_CASE("solve leaves particular unset for homogeneous input") {
    auto g = solve(ProblemSpec({1, 1}, SubstMap(0.5)));
    CHECK_FALSE(g.particular);
    CHECK_FALSE(g.constants);
    CHECK(g.basis.size() == 2);
}

}  // TEST_SUITE
