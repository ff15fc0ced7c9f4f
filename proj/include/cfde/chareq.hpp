#pragma once

// Characteristic polynomial r^n + p_{n-1} r^{n-1} + ... + p_0 and its roots.

#include <complex>
#include <span>
#include <vector>

#include "cfde/errors.hpp"

namespace cfde {

using Complex = std::complex<double>;

/// Monic real polynomial; only the lower coefficients p_0..p_{n-1} are stored.
class CharPoly {
public:
    explicit CharPoly(std::vector<double> lower);

    int degree() const noexcept { return static_cast<int>(lower_.size()); }
    const std::vector<double>& lower() const noexcept { return lower_; }

    /// Coefficient of r^i for i = 0..n (the r^n coefficient is 1).
    double coeff(int i) const noexcept { return i == degree() ? 1.0 : lower_[i]; }

    /// max(1, max_i |p_i|)
    double scale() const noexcept;

private:
    std::vector<double> lower_;
};

struct RootEntry {
    Complex root;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<RootEntry> entries;  // sorted by (re, im)

    int total_multiplicity() const noexcept;
};

Complex eval_poly(const CharPoly& p, Complex r);

/// order-th derivative of P at r by Horner on the differentiated coefficients.
Complex eval_poly_deriv(const CharPoly& p, Complex r, int order);

/// Aberth-Ehrlich simultaneous iteration followed by multiplicity
/// clustering and conjugate pairing. Throws RootFindingError.
RootSet find_roots(const CharPoly& p);

/// Lower coefficients of prod (r - root)^mult, real parts only.
std::vector<double> expand_roots(const RootSet& roots);

namespace detail {

/// Raw Aberth iterates before clustering.
std::vector<Complex> aberth_iterates(const CharPoly& p);

}  // namespace detail

}  // namespace cfde
