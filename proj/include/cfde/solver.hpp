#pragma once

// Homogeneous basis construction and variation of parameters for
//
//     nT y + p_{n-1} (n-1)T y + ... + p_1 T y + p_0 y = q
//
// where kT is the k-fold sequential conformable derivative. All work happens
// in u = t^a / a, where T is d/du.

#include <optional>
#include <span>
#include <vector>

#include "cfde/chareq.hpp"
#include "cfde/ualgebra.hpp"

namespace cfde {

struct ProblemSpec {
    std::vector<double> coeffs;  // p_0 .. p_{n-1}
    SubstMap subst{1.0};
    UExpr forcing;  // zero for the homogeneous equation

    ProblemSpec(std::vector<double> lower, SubstMap s, UExpr q = {});

    int order() const noexcept { return static_cast<int>(coeffs.size()); }
    double alpha() const noexcept { return subst.alpha(); }
};

enum class BasisKind { Real, CosPartner, SinPartner };

const char* to_string(BasisKind kind) noexcept;

struct BasisProvenance {
    Complex root;      // generating root (upper half-plane member for pairs)
    int multiplicity;  // multiplicity of that root
    int power;         // l in u^l
    BasisKind kind;
};

struct SolutionBasis {
    std::vector<UExpr> elements;
    std::vector<BasisProvenance> provenance;
    RootSet roots;

    int size() const noexcept { return static_cast<int>(elements.size()); }
};

/// Dense row-major matrix of expressions.
class UMatrix {
public:
    UMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    UExpr& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
    const UExpr& operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

private:
    int rows_;
    int cols_;
    std::vector<UExpr> data_;
};

struct ParticularSolution {
    UExpr v;
    std::vector<UExpr> cprimes;  // conformable derivatives of the varied constants
    std::vector<UExpr> cfuncs;   // the varied constants themselves
};

struct GeneralSolution {
    SolutionBasis basis;
    std::optional<UExpr> particular;
    std::optional<std::vector<double>> constants;

    /// y = sum c_i y_i + v; unset constants count as 1.
    UExpr combined() const;
};

/// L[y] = nT y + sum_i p_i iT y with kT the k-fold diff_u.
UExpr apply_operator(const ProblemSpec& spec, const UExpr& y);

SolutionBasis homogeneous_basis(const ProblemSpec& spec);

/// Entry (i, j) = i-fold derivative of basis element j, i = 0..n-1.
UMatrix derivative_matrix(const SolutionBasis& basis);

/// Symbolic determinant of a square UMatrix (Laplace expansion over column
/// subsets).
UExpr determinant(const UMatrix& m);

/// Determinant of derivative_matrix, required to be a single c·e^{ru} term.
UTerm wronskian(const SolutionBasis& basis);

/// Cramer's rule on the variation-of-parameters system, then term-wise
/// antiderivatives, followed by one refinement pass on the residual
/// L[v] - q. Throws std::invalid_argument for zero forcing.
ParticularSolution particular_solution(const ProblemSpec& spec, const SolutionBasis& basis);

GeneralSolution solve(const ProblemSpec& spec);

/// Constants c_1..c_n such that iT y(t0) = targets[i], i = 0..n-1.
std::vector<double> fit_constants(const GeneralSolution& g, double t0,
                                  std::span<const double> targets, const SubstMap& subst);

}  // namespace cfde
