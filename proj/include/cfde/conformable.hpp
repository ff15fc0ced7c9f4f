#pragma once

// Numeric conformable calculus straight from the limit and integral
// definitions. Used as an oracle for the symbolic engine; it never touches
// diff_u or integrate_u.

#include <functional>

#include "cfde/ualgebra.hpp"

namespace cfde {

/// Below this t every numeric operation refuses to run.
inline constexpr double kDomainFloor = 1e-6;

/// Real function of t > 0 together with the interval it may be sampled on.
/// Sampling happens in long double; a double callback is simply widened.
class GridFn {
public:
    GridFn(std::function<double(double)> fn, double t_lo, double t_hi);
    static GridFn extended(std::function<long double(long double)> fn, double t_lo, double t_hi);

    double operator()(double t) const;
    long double wide(long double t) const;
    double t_lo() const noexcept { return lo_; }
    double t_hi() const noexcept { return hi_; }

private:
    GridFn(double t_lo, double t_hi);

    std::function<long double(long double)> fn_;
    double lo_;
    double hi_;
};

/// GridFn that evaluates f under u = t^a / a, term by term in long double.
GridFn grid_fn(const UExpr& f, const SubstMap& subst, double t_lo = kDomainFloor,
               double t_hi = 1e6);

/// (f(t + e t^{1-a}) - f(t - e t^{1-a})) / (2e) for an explicit e.
double central_quotient(const GridFn& f, double t, double alpha, double eps);

/// One-sided (f(t + e t^{1-a}) - f(t)) / e.
double forward_quotient(const GridFn& f, double t, double alpha, double eps);

/// order-fold sequential conformable derivative. Each level is the central
/// quotient extrapolated twice in e (Richardson), with e chosen from the order.
double numeric_t_alpha_derivative(const GridFn& f, double t, double alpha, int order = 1);

/// Default step used by numeric_t_alpha_derivative for a given total order.
double default_step(int order);

struct SimpsonOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 40;
};

/// Adaptive Simpson on [a, b]. Throws QuadratureError when the tolerance is
/// not met within max_depth bisections.
double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        const SimpsonOptions& opts = {});

/// int_a^t x^{a-1} f(x) dx.
double numeric_conformable_integral(const GridFn& f, double a, double t, double alpha,
                                    const SimpsonOptions& opts = {});

/// |LHS - RHS| of integration by parts for the conformable integral on
/// [a, b], with both conformable derivatives taken numerically.
double integration_by_parts_check(const UExpr& f, const UExpr& g, double a, double b,
                                  double alpha);

}  // namespace cfde
