#pragma once

// Dense complex matrices: resolvents, ideal norms, traces and eigendecompositions.

#include "opcalc/kernels.hpp"
#include "opcalc/measure.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>

namespace opcalc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Throws InvalidArgument unless A is square, non-empty and finite.
void require_square(const Matrix& A, const char* what = "matrix");

struct IdealNorm {
    enum class Kind { operator_norm, trace, schatten, hilbert_schmidt };
    Kind kind = Kind::operator_norm;
    double p = 2.0;  // only for schatten

    static IdealNorm op() { return {Kind::operator_norm, 0.0}; }
    static IdealNorm trace_class() { return {Kind::trace, 1.0}; }
    static IdealNorm schatten_p(double p);
    static IdealNorm hs() { return {Kind::hilbert_schmidt, 2.0}; }

    /// "op", "trace", "hs", "schatten:p"
    static IdealNorm parse(const std::string& text);
    std::string name() const;
};

/// Reciprocal condition below which tI - A counts as singular.
inline constexpr double kResolventRcondFloor = 1e-14;

/// (tI - A)^{-1} by partial-pivot LU. Throws SpectrumHit when the reciprocal
/// condition estimate falls below kResolventRcondFloor.
Matrix resolvent(const Matrix& A, cplx t);

/// Resolvent together with its reciprocal condition estimate.
struct ResolventSolve {
    Matrix R;
    double rcond;
};
ResolventSolve resolvent_with_condition(const Matrix& A, cplx t);

Eigen::VectorXd singular_values(const Matrix& S);
double norm(const Matrix& S, IdealNorm which);
inline double op_norm(const Matrix& S) { return norm(S, IdealNorm::op()); }
double frobenius(const Matrix& S);

cplx trace(const Matrix& S);
/// tr(X Y) without forming the product.
cplx trace_of_product(const Matrix& X, const Matrix& Y);

struct EigenDecomposition {
    Vector values;
    Matrix vectors;          // unit columns
    double condition = 0.0;  // 2-norm condition number of the eigenvector matrix
    double residual = 0.0;   // ||A V - V Lambda|| / max(1, ||A||)
    bool ill_conditioned = false;  // condition > 1e6
    bool defective = false;        // condition > 1e12 or V singular
};

EigenDecomposition eig(const Matrix& A);

/// ||A - A^*|| style normality defect ||A A^* - A^* A|| / max(1, ||A||^2).
double normality_defect(const Matrix& A);

template <>
struct Accumulator<Matrix> {
    Matrix sum;
    Matrix comp;

    explicit Accumulator(const Matrix& zero) : sum(zero), comp(Matrix::Zero(zero.rows(), zero.cols())) {}
    static bool finite(const Matrix& v) { return v.allFinite(); }
    void add(double w, const Matrix& v)
    {
        kernels::axpy_compensated(cplx(w, 0.0), std::span<const cplx>(v.data(), static_cast<std::size_t>(v.size())),
                                  std::span<cplx>(sum.data(), static_cast<std::size_t>(sum.size())),
                                  std::span<cplx>(comp.data(), static_cast<std::size_t>(comp.size())));
    }
    Matrix result() const { return sum; }
};

}  // namespace opcalc
