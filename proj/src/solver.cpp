#include "cfde/solver.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfde {

namespace {

// D[mask] = det of rows 0..popcount(mask)-1 restricted to the columns in mask.
std::vector<UExpr> minor_table(const UMatrix& m, int rows) {
    const int n = m.cols();
    std::vector<UExpr> table(std::size_t{1} << n);
    table[0] = UExpr::constant(1.0);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        const int k = std::popcount(mask);
        if (k > rows) continue;
        std::vector<UTerm> acc;
        int pos = 0;
        for (int c = 0; c < n; ++c) {
            if (!(mask & (1u << c))) continue;
            const UExpr& rest = table[mask & ~(1u << c)];
            const double sign = ((k - 1 + pos) % 2 == 0) ? 1.0 : -1.0;
            const UExpr prod = mul(m(k - 1, c), rest);
            for (UTerm t : prod) {
                t.coeff *= sign;
                acc.push_back(t);
            }
            ++pos;
        }
        table[mask] = canonicalize(std::move(acc));
    }
    return table;
}

UTerm single_term(const UExpr& w) {
    if (w.size() != 1) {
        throw WronskianError("Wronskian does not reduce to a single exponential term: " +
                             (w.is_zero() ? std::string("0") : to_u_string(w)));
    }
    const UTerm& t = w.terms().front();
    if (t.upow != 0 || t.trig != Trig::None) {
        throw WronskianError("Wronskian is not of the form C·e^{au}: " + to_u_string(w));
    }
    return t;
}

}  // namespace

ProblemSpec::ProblemSpec(std::vector<double> lower, SubstMap s, UExpr q)
    : coeffs(std::move(lower)), subst(s), forcing(std::move(q)) {
    if (coeffs.empty()) throw std::invalid_argument("equation order must be at least 1");
}

const char* to_string(BasisKind kind) noexcept {
    switch (kind) {
        case BasisKind::CosPartner: return "cos";
        case BasisKind::SinPartner: return "sin";
        case BasisKind::Real: break;
    }
    return "real";
}

UExpr GeneralSolution::combined() const {
    std::vector<UTerm> acc;
    for (int i = 0; i < basis.size(); ++i) {
        const double c = constants ? (*constants)[std::size_t(i)] : 1.0;
        for (UTerm t : basis.elements[std::size_t(i)]) {
            t.coeff *= c;
            acc.push_back(t);
        }
    }
    if (particular) acc.insert(acc.end(), particular->begin(), particular->end());
    return canonicalize(std::move(acc));
}

UExpr apply_operator(const ProblemSpec& spec, const UExpr& y) {
    std::vector<UTerm> acc;
    UExpr d = y;
    for (int i = 0; i <= spec.order(); ++i) {
        if (i > 0) d = diff_u(d);
        const double p = i == spec.order() ? 1.0 : spec.coeffs[std::size_t(i)];
        if (p == 0.0) continue;
        for (UTerm t : d) {
            t.coeff *= p;
            acc.push_back(t);
        }
    }
    return canonicalize(std::move(acc));
}

SolutionBasis homogeneous_basis(const ProblemSpec& spec) {
    SolutionBasis basis;
    basis.roots = find_roots(CharPoly(spec.coeffs));
    for (const auto& e : basis.roots.entries) {
        const double theta = e.root.real();
        const double beta = e.root.imag();
        if (beta < 0.0) continue;  // represented by its upper partner
        for (int l = 0; l < e.multiplicity; ++l) {
            if (beta == 0.0) {
                basis.elements.push_back(UExpr::term(make_term(1.0, l, theta)));
                basis.provenance.push_back({e.root, e.multiplicity, l, BasisKind::Real});
            } else {
                basis.elements.push_back(UExpr::term(make_term(1.0, l, theta, Trig::Cos, beta)));
                basis.provenance.push_back({e.root, e.multiplicity, l, BasisKind::CosPartner});
                basis.elements.push_back(UExpr::term(make_term(1.0, l, theta, Trig::Sin, beta)));
                basis.provenance.push_back({e.root, e.multiplicity, l, BasisKind::SinPartner});
            }
        }
    }
    if (basis.size() != spec.order()) {
        throw RootFindingError("basis has " + std::to_string(basis.size()) +
                               " elements for an equation of order " +
                               std::to_string(spec.order()));
    }
    return basis;
}

UMatrix derivative_matrix(const SolutionBasis& basis) {
    const int n = basis.size();
    UMatrix m(n, n);
    for (int j = 0; j < n; ++j) {
        UExpr d = basis.elements[std::size_t(j)];
        for (int i = 0; i < n; ++i) {
            if (i > 0) d = diff_u(d);
            m(i, j) = d;
        }
    }
    return m;
}

UExpr determinant(const UMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
    if (m.cols() > 20) throw std::invalid_argument("determinant: matrix too large");
    if (m.rows() == 0) return UExpr::constant(1.0);
    return minor_table(m, m.rows()).back();
}

UTerm wronskian(const SolutionBasis& basis) {
    return single_term(determinant(derivative_matrix(basis)));
}

namespace {

// Variation of parameters for forcing q against precomputed minors.
ParticularSolution cramer(const UExpr& q, const std::vector<UExpr>& table, const UTerm& w,
                          const SolutionBasis& basis) {
    const int n = basis.size();
    const unsigned full = (1u << n) - 1;
    ParticularSolution out;
    std::vector<UTerm> v_terms;
    for (int i = 0; i < n; ++i) {
        // Column i replaced by (0, ..., 0, q): expand along that column.
        const double sign = ((n - 1 + i) % 2 == 0) ? 1.0 : -1.0;
        const UExpr numer = scale(mul(q, table[full & ~(1u << i)]), sign);
        UExpr cprime = div_by_term(numer, w);
        UExpr c = integrate_u(cprime);
        const UExpr contrib = mul(c, basis.elements[std::size_t(i)]);
        v_terms.insert(v_terms.end(), contrib.begin(), contrib.end());
        out.cprimes.push_back(std::move(cprime));
        out.cfuncs.push_back(std::move(c));
    }
    out.v = canonicalize(std::move(v_terms));
    return out;
}

// a + s b, merged before pruning so small corrections survive.
UExpr add_scaled(const UExpr& a, const UExpr& b, double s) {
    std::vector<UTerm> terms(a.begin(), a.end());
    for (UTerm t : b) {
        t.coeff *= s;
        terms.push_back(t);
    }
    return canonicalize(std::move(terms));
}

}  // namespace

ParticularSolution particular_solution(const ProblemSpec& spec, const SolutionBasis& basis) {
    if (spec.forcing.is_zero()) {
        throw std::invalid_argument("particular_solution needs a non-zero forcing term");
    }
    const int n = basis.size();
    if (n != spec.order()) throw std::invalid_argument("basis size does not match equation order");

    const UMatrix m = derivative_matrix(basis);
    const auto table = minor_table(m, n);
    const UTerm w = single_term(table[(1u << n) - 1]);

    ParticularSolution out = cramer(spec.forcing, table, w, basis);
    // One refinement pass: v is a sum of partially cancelling products, so
    // its coefficients carry rounding relative to those products. Solving
    // again for the residual recovers the lost digits. The residual is
    // brought to unit scale first because pruning has an absolute floor.
    const UExpr r = sub(apply_operator(spec, out.v), spec.forcing);
    if (!r.is_zero()) {
        double s = 0.0;
        for (const auto& t : r) s = std::max(s, std::abs(t.coeff));
        const ParticularSolution fix = cramer(scale(r, -1.0 / s), table, w, basis);
        out.v = add_scaled(out.v, fix.v, s);
        for (int i = 0; i < n; ++i) {
            const auto k = std::size_t(i);
            out.cprimes[k] = add_scaled(out.cprimes[k], fix.cprimes[k], s);
            out.cfuncs[k] = add_scaled(out.cfuncs[k], fix.cfuncs[k], s);
        }
    }
    return out;
}

GeneralSolution solve(const ProblemSpec& spec) {
    GeneralSolution g;
    g.basis = homogeneous_basis(spec);
    if (!spec.forcing.is_zero()) g.particular = particular_solution(spec, g.basis).v;
    return g;
}

std::vector<double> fit_constants(const GeneralSolution& g, double t0,
                                  std::span<const double> targets, const SubstMap& subst) {
    const int n = g.basis.size();
    if (!(t0 > 0.0)) throw DomainError("initial point must satisfy t0 > 0");
    if (static_cast<int>(targets.size()) != n) {
        throw std::invalid_argument("expected " + std::to_string(n) + " initial values, got " +
                                    std::to_string(targets.size()));
    }
    const UMatrix m = derivative_matrix(g.basis);
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    UExpr dv = g.particular.value_or(UExpr{});
    for (int i = 0; i < n; ++i) {
        if (i > 0) dv = diff_u(dv);
        b(i) = targets[std::size_t(i)] - eval(dv, t0, subst);
        for (int j = 0; j < n; ++j) a(i, j) = eval(m(i, j), t0, subst);
    }
    // Column equilibration keeps the conditioning test independent of the
    // growth rates of the basis functions.
    Eigen::VectorXd colscale = a.cwiseAbs().colwise().maxCoeff().transpose();
    for (int j = 0; j < n; ++j) {
        if (colscale(j) == 0.0 || !std::isfinite(colscale(j))) {
            throw SingularMatrixError("initial-value matrix has a degenerate column at t0 = " +
                                      format_real(t0));
        }
    }
    const Eigen::MatrixXd scaled = a * colscale.cwiseInverse().asDiagonal();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
    if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
        throw SingularMatrixError("initial-value matrix is numerically singular at t0 = " +
                                  format_real(t0));
    }
    const Eigen::VectorXd x = lu.solve(b).cwiseQuotient(colscale);
    return {x.data(), x.data() + n};
}

}  // namespace cfde
