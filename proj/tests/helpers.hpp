#pragma once

// Shared generators and oracles for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cfde/chareq.hpp"
#include "cfde/cli.hpp"
#include "cfde/solver.hpp"
#include "cfde/ualgebra.hpp"

namespace cfde::test {

inline double pick(std::mt19937_64& rng, std::initializer_list<double> xs) {
    std::uniform_int_distribution<std::size_t> d(0, xs.size() - 1);
    return *(xs.begin() + d(rng));
}

/// Term drawn from a small key set so that merging actually happens.
inline UTerm random_term(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    std::uniform_int_distribution<int> upow(0, 3);
    std::uniform_int_distribution<int> trig(0, 2);
    const auto tr = static_cast<Trig>(trig(rng));
    const double freq = tr == Trig::None ? 0.0 : pick(rng, {0.5, 1.0, 2.0, 3.0});
    const double c = coeff(rng);
    const int k = upow(rng);
    const double rate = pick(rng, {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0});
    return make_term(c, k, rate, tr, freq);
}

inline UExpr random_uexpr(std::mt19937_64& rng, int max_terms) {
    std::uniform_int_distribution<int> n(1, max_terms);
    std::vector<UTerm> terms;
    for (int i = n(rng); i > 0; --i) terms.push_back(random_term(rng));
    return canonicalize(std::move(terms));
}

/// Lower coefficients of a monic polynomial with entries in [-lim, lim].
inline std::vector<double> random_coeffs(std::mt19937_64& rng, int order, double lim) {
    std::uniform_real_distribution<double> c(-lim, lim);
    std::vector<double> p(static_cast<std::size_t>(order));
    for (auto& x : p) x = c(rng);
    return p;
}

/// Lower coefficients of a monic polynomial whose roots sit on a lattice
/// with spacing 1/2 (real roots and complex pairs, multiplicity at most 2).
/// Forcing rates from random_term either hit such a root exactly, which is
/// genuine resonance, or stay at least 1/2 away from every root; random
/// real coefficients instead produce near-resonant, arbitrarily
/// ill-conditioned problems.
inline std::vector<double> lattice_coeffs(std::mt19937_64& rng, int max_order) {
    std::uniform_int_distribution<int> order(1, max_order);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> re(-5, 3);
    std::uniform_int_distribution<int> im(1, 4);
    const int n = order(rng);
    RootSet roots;
    int degree = 0;
    while (degree < n) {
        const bool pair = n - degree >= 2 && coin(rng) == 1;
        const double x = 0.5 * re(rng);
        const Complex z(x, pair ? 0.5 * im(rng) : 0.0);
        auto it = std::find_if(roots.entries.begin(), roots.entries.end(),
                               [&](const RootEntry& e) { return e.root == z; });
        if (it != roots.entries.end()) {
            if (it->multiplicity == 2) continue;
            ++it->multiplicity;
        } else {
            roots.entries.push_back({z, 1});
        }
        if (pair) {
            auto jt = std::find_if(roots.entries.begin(), roots.entries.end(),
                                   [&](const RootEntry& e) { return e.root == std::conj(z); });
            if (jt != roots.entries.end()) {
                ++jt->multiplicity;
            } else {
                roots.entries.push_back({std::conj(z), 1});
            }
        }
        degree += pair ? 2 : 1;
    }
    return expand_roots(roots);
}

/// Largest relative residual of y over the verification grid.
inline double max_residual(const ProblemSpec& spec, const UExpr& y, const UExpr& q,
                           double lo = cli::kGridFloor, double hi = cli::kDefaultGridHi,
                           int count = cli::kDefaultGridCount) {
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const double t = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
        worst = std::max(worst, cli::relative_residual(spec, y, q, t));
    }
    return worst;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + format_real(x);
    return s;
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace cfde::test
