#pragma once

// f(A) = integral A R(t, A) dtau(t), evaluated as integral (-I + t R(t, A)) dtau(t),
// plus two independent oracles: eigendecomposition and a Cauchy contour integral.

#include "opcalc/contour.hpp"
#include "opcalc/matrixcore.hpp"
#include "opcalc/opclass.hpp"
#include "opcalc/symbols.hpp"

#include <functional>
#include <vector>

namespace opcalc {

struct AdaptiveOptions {
    double tolerance = 1e-10;  // relative change between successive orders
    int max_order = 1024;
    bool parallel = true;
};

/// Matrix-valued integrals integral G(t) dtau(t) with order doubling. The integrand
/// returns a fixed-length family of matrices (e.g. all Taylor coefficients at once).
struct MatrixIntegral {
    std::vector<Matrix> values;
    int order = 0;
    double change = 0.0;  // max relative change at the last doubling
    bool converged = false;
    bool graded = false;
};

using MatrixFamily = std::function<std::vector<Matrix>(double)>;

/// Evaluates on one rule; integrand values are computed (possibly concurrently)
/// and accumulated in node order.
std::vector<Matrix> integrate_family(const QuadratureRule& rule, const MatrixFamily& integrand, std::size_t count,
                                     Eigen::Index dim, bool parallel = true);

/// singularities: points (usually eigenvalues) where the integrand blows up;
/// used to grade the rule when they come close to the support.
MatrixIntegral integrate_adaptive(const RepresentingMeasure& measure, const std::vector<cplx>& singularities,
                                  const MatrixFamily& integrand, std::size_t count, Eigen::Index dim,
                                  const AdaptiveOptions& options = {});

/// Throws CertificateMismatch unless the certificate interval covers the symbol support.
void require_covers(const MarkovSymbol& f, const OperatorCertificate& cert);

struct ApplyResult {
    Matrix value;
    int order = 0;
    double change = 0.0;
    bool converged = false;
};

ApplyResult apply_detailed(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert,
                           const AdaptiveOptions& options = {});
Matrix apply(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert);

/// f(A) on a fixed rule (no adaptivity, no certificate). Finite-difference
/// checks use one rule for every evaluation so quadrature error cancels.
Matrix apply_on_rule(const QuadratureRule& rule, const Matrix& A);

/// V diag(f(lambda_i)) V^{-1} with the symbol's reference evaluator.
/// Throws OracleRefused when the eigenbasis condition number is >= 1e6.
Matrix oracle_eig(const MarkovSymbol& f, const Matrix& A);

struct ContourOracleResult {
    Matrix value;
    enum class Mode { encloses_spectrum, encloses_support } mode;
    int nodes = 0;
    double change = 0.0;
    bool converged = false;
};

/// Holomorphic-calculus value of f(A) by the trapezoidal rule on a closed contour.
/// If the contour encloses sigma(A) but not the support: (1/2 pi i) oint f(z) R(z, A) dz.
/// If it encloses the support but not sigma(A): f(inf) I - (1/2 pi i) oint f(z) R(z, A) dz.
/// Nodes are doubled until the result moves by less than 1e-9 relative.
ContourOracleResult oracle_contour_detailed(const MarkovSymbol& f, const Matrix& A, const ContourSpec& contour,
                                            int max_nodes = 16384);
Matrix oracle_contour(const MarkovSymbol& f, const Matrix& A, const ContourSpec& contour);

/// Ellipse around the support hull of f, at the geometric mean of the elliptic
/// radii of the support (1) and of the nearest eigenvalue of A.
ContourSpec default_support_contour(const MarkovSymbol& f, const Matrix& A, int nodes = 256);

}  // namespace opcalc
