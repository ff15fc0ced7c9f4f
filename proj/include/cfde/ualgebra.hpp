#pragma once

// Exponential-polynomial-trigonometric algebra in the variable u = t^a / a.
//
// Every expression is a finite sum of terms
//
//     c * u^k * exp(r*u) * {1 | cos(w*u) | sin(w*u)}
//
// Under the substitution u = t^a / a the conformable derivative T_a acts as
// d/du, so differentiation and antidifferentiation here are the ordinary
// calculus operations on u.

#include <cstdint>
#include <string>
#include <vector>

#include "cfde/errors.hpp"

namespace cfde {

enum class Trig : std::uint8_t { None = 0, Cos = 1, Sin = 2 };

const char* to_string(Trig trig) noexcept;

struct UTerm {
    double coeff = 0.0;
    int upow = 0;        // k in u^k
    double erate = 0.0;  // r in exp(r*u)
    Trig trig = Trig::None;
    double tfreq = 0.0;  // w in cos(w*u) / sin(w*u); 0 iff trig == None

    friend bool operator==(const UTerm&, const UTerm&) = default;
};

/// Builds a term with the trig parity normalised (w >= 0).
/// cos(-w u) = cos(w u); sin(-w u) = -sin(w u).
UTerm make_term(double coeff, int upow = 0, double erate = 0.0,
                Trig trig = Trig::None, double tfreq = 0.0);

/// Canonical, immutable sum of UTerms. The empty sum is zero.
class UExpr {
public:
    UExpr() = default;

    static UExpr constant(double c);
    static UExpr term(const UTerm& t);
    static UExpr u_power(int k, double coeff = 1.0);
    static UExpr exponential(double rate, double coeff = 1.0);

    const std::vector<UTerm>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    auto begin() const noexcept { return terms_.begin(); }
    auto end() const noexcept { return terms_.end(); }

    friend bool operator==(const UExpr&, const UExpr&) = default;

private:
    friend UExpr canonicalize(std::vector<UTerm> terms);
    explicit UExpr(std::vector<UTerm> canonical) : terms_(std::move(canonical)) {}

    std::vector<UTerm> terms_;
};

/// Binds a fractional order a in (0, 1] and maps t to u = t^a / a.
class SubstMap {
public:
    explicit SubstMap(double alpha);

    double alpha() const noexcept { return alpha_; }
    double u_of(double t) const;

private:
    double alpha_;
};

// Tolerances of the canonical form.
inline constexpr double kPruneRelTol = 1e-12;
// Rates and frequencies closer than this (relative to max(1, |x|)) share a key.
inline constexpr double kKeyTol = 1e-9;

/// Merge like terms, prune cancellation noise, sort. Idempotent.
UExpr canonicalize(std::vector<UTerm> terms);

UExpr add(const UExpr& f, const UExpr& g);
UExpr sub(const UExpr& f, const UExpr& g);
UExpr mul(const UExpr& f, const UExpr& g);
UExpr scale(const UExpr& f, double c);

/// Pointwise division by c * exp(r*u). Any other divisor leaves the algebra
/// and is rejected with std::invalid_argument.
UExpr div_by_term(const UExpr& f, const UTerm& d);

UExpr diff_u(const UExpr& f);
UExpr diff_u(const UExpr& f, int times);

/// Antiderivative in u with the integration constant fixed to zero.
UExpr integrate_u(const UExpr& f);

/// Value at u directly (no t-substitution).
double eval_u(const UExpr& f, double u);

/// Value at t > 0 under u = t^a / a. Throws DomainError for t <= 0.
double eval(const UExpr& f, double t, const SubstMap& subst);

/// Sum of |c| u^k exp(r u) over the terms: a bound on |eval| used for
/// relative tolerances.
double magnitude(const UExpr& f, double t, const SubstMap& subst);

/// True when both expressions carry the same keys and every coefficient
/// agrees within rel_tol relative to max(1, |coeff|).
bool approx_equal(const UExpr& f, const UExpr& g, double rel_tol = 1e-12);

/// Coefficient of the term with the given key, 0 if absent.
double coefficient(const UExpr& f, int upow, double erate,
                   Trig trig = Trig::None, double tfreq = 0.0);

inline UExpr operator+(const UExpr& f, const UExpr& g) { return add(f, g); }
inline UExpr operator-(const UExpr& f, const UExpr& g) { return sub(f, g); }
inline UExpr operator-(const UExpr& f) { return scale(f, -1.0); }
inline UExpr operator*(const UExpr& f, const UExpr& g) { return mul(f, g); }
inline UExpr operator*(double c, const UExpr& f) { return scale(f, c); }
inline UExpr operator*(const UExpr& f, double c) { return scale(f, c); }

// Rendering ------------------------------------------------------------------

/// Shortest decimal string that parses back to the same double.
std::string format_real(double x);

/// Coefficient as a small rational "(p/q)" when one matches to 1e-12,
/// otherwise format_real.
std::string format_coeff(double x);

/// u-form, e.g. "(1/15)·e^{2u}".
std::string to_u_string(const UExpr& f);

/// t-form with a substituted, e.g. "(1/15)·e^{2·t^1}".
std::string to_t_string(const UExpr& f, const SubstMap& subst);

}  // namespace cfde
