#include "cfde/conformable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfde {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_point(double t) {
    if (!(t >= kDomainFloor)) {
        throw DomainError("numeric conformable operations need t >= 1e-6, got " + format_real(t));
    }
}

using Wide = long double;

Wide richardson_level(const GridFn& f, Wide t, Wide alpha, int order, Wide eps) {
    if (order == 0) return f.wide(t);
    require_point(static_cast<double>(t));
    const Wide ta = std::pow(t, alpha);
    const Wide lever = t / ta;
    auto quotient = [&](Wide e) {
        const Wide h = e * lever;
        return (richardson_level(f, t + h, alpha, order - 1, eps) -
                richardson_level(f, t - h, alpha, order - 1, eps)) /
               (2 * e);
    };
    // The central quotient is even in e: two extrapolations over e, e/2, e/4
    // remove the e^2 and e^4 terms.
    const Wide q1 = quotient(eps);
    const Wide q2 = quotient(eps / 2);
    const Wide q4 = quotient(eps / 4);
    const Wide r1 = (4 * q2 - q1) / 3;
    const Wide r2 = (4 * q4 - q2) / 3;
    return (16 * r2 - r1) / 15;
}

Wide eval_wide(const UExpr& f, Wide u) {
    Wide sum = 0;
    for (const auto& t : f) {
        Wide v = t.coeff * std::pow(u, t.upow) * std::exp(Wide(t.erate) * u);
        if (t.trig == Trig::Cos) v *= std::cos(Wide(t.tfreq) * u);
        if (t.trig == Trig::Sin) v *= std::sin(Wide(t.tfreq) * u);
        sum += v;
    }
    return sum;
}

struct SimpsonState {
    const std::function<double(double)>& g;
    double floor_tol;
    bool failed = false;
};

double simpson_rec(SimpsonState& s, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = s.g(lm);
    const double frm = s.g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * std::max(tol, s.floor_tol * (std::abs(left) + std::abs(right)))) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0 || m <= a || m >= b) {
        s.failed = true;
        return left + right + delta / 15.0;
    }
    return simpson_rec(s, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(s, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

GridFn::GridFn(std::function<double(double)> fn, double t_lo, double t_hi)
    : GridFn(t_lo, t_hi) {
    if (!fn) throw std::invalid_argument("GridFn needs a callable");
    fn_ = [fn = std::move(fn)](long double t) -> long double { return fn(static_cast<double>(t)); };
}

GridFn::GridFn(double t_lo, double t_hi) : lo_(t_lo), hi_(t_hi) {
    if (!(t_lo > 0.0 && t_lo < t_hi)) {
        throw std::invalid_argument("GridFn domain must satisfy 0 < t_lo < t_hi");
    }
}

GridFn GridFn::extended(std::function<long double(long double)> fn, double t_lo, double t_hi) {
    if (!fn) throw std::invalid_argument("GridFn needs a callable");
    GridFn g(t_lo, t_hi);
    g.fn_ = std::move(fn);
    return g;
}

double GridFn::operator()(double t) const { return static_cast<double>(wide(t)); }

long double GridFn::wide(long double t) const {
    if (!(t >= lo_ && t <= hi_)) {
        throw DomainError("sample point " + format_real(static_cast<double>(t)) + " outside [" +
                          format_real(lo_) + ", " + format_real(hi_) + "]");
    }
    return fn_(t);
}

GridFn grid_fn(const UExpr& f, const SubstMap& subst, double t_lo, double t_hi) {
    const Wide alpha = subst.alpha();
    return GridFn::extended([f, alpha](Wide t) { return eval_wide(f, std::pow(t, alpha) / alpha); },
                            t_lo, t_hi);
}

double central_quotient(const GridFn& f, double t, double alpha, double eps) {
    require_point(t);
    const double h = eps * std::pow(t, 1.0 - alpha);
    return (f(t + h) - f(t - h)) / (2.0 * eps);
}

double forward_quotient(const GridFn& f, double t, double alpha, double eps) {
    require_point(t);
    const double h = eps * std::pow(t, 1.0 - alpha);
    return (f(t + h) - f(t)) / eps;
}

double default_step(int order) {
    // Truncation after two extrapolations is O(e^6); round-off of the
    // order-fold nested quotient is O(eps / e^order), with eps that of long double.
    return std::pow(static_cast<double>(std::numeric_limits<long double>::epsilon()),
                    1.0 / (order + 6.0));
}

double numeric_t_alpha_derivative(const GridFn& f, double t, double alpha, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (order == 0) return f(t);
    // One e for every nesting level: an e that varied with the sample point
    // would put kinks into the inner results that the outer levels amplify.
    // The cap keeps the total reach, about order * e * t^{1-a}, inside (0, t).
    const double ta = std::pow(t, alpha);
    const double eps = std::min(default_step(order) * std::max(1.0, ta), ta / (4.0 * order));
    return static_cast<double>(richardson_level(f, t, alpha, order, eps));
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        const SimpsonOptions& opts) {
    if (a == b) return 0.0;
    const double fa = g(a);
    const double fb = g(b);
    const double fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(whole));
    SimpsonState s{g, 4.0 * kEps};
    const double value = simpson_rec(s, a, b, fa, fm, fb, whole, tol, opts.max_depth);
    if (s.failed || !std::isfinite(value)) {
        throw QuadratureError("adaptive Simpson did not reach tolerance on [" + format_real(a) +
                                  ", " + format_real(b) + "]",
                              value);
    }
    return value;
}

double numeric_conformable_integral(const GridFn& f, double a, double t, double alpha,
                                    const SimpsonOptions& opts) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    require_point(a);
    if (!(a < t)) throw DomainError("conformable integral needs a < t");
    auto integrand = [&](double x) { return std::pow(x, alpha - 1.0) * f(x); };
    return adaptive_simpson(integrand, a, t, opts);
}

double integration_by_parts_check(const UExpr& f, const UExpr& g, double a, double b,
                                  double alpha) {
    const SubstMap subst(alpha);
    if (!(a >= kDomainFloor && a < b)) throw DomainError("need 0 < a < b");
    const GridFn F = grid_fn(f, subst, 0.5 * a, 2.0 * b);
    const GridFn G = grid_fn(g, subst, 0.5 * a, 2.0 * b);
    auto lhs_integrand = [&](double x) {
        return std::pow(x, alpha - 1.0) * F(x) * numeric_t_alpha_derivative(G, x, alpha);
    };
    auto rhs_integrand = [&](double x) {
        return std::pow(x, alpha - 1.0) * G(x) * numeric_t_alpha_derivative(F, x, alpha);
    };
    const double lhs = adaptive_simpson(lhs_integrand, a, b);
    const double rhs = F(b) * G(b) - F(a) * G(a) - adaptive_simpson(rhs_integrand, a, b);
    return std::abs(lhs - rhs);
}

}  // namespace cfde
