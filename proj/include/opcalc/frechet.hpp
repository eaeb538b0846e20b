#pragma once

// Derivatives of A -> f(A):
//   f_A^grad(B) = integral R(t, A) B R(t, A) t dtau(t)        (Frechet derivative)
//   f'(A)       = integral R(t, A)^2 t dtau(t)
//   C_n         = integral (R(t, A) B)^n R(t, A) t dtau(t)   (f(A + zB) - f(A) = sum z^n C_n)
// The series converges for |z| < delta_A / ||B||.

#include "opcalc/funcalc.hpp"

#include <vector>

namespace opcalc {

Matrix frechet_derivative(const MarkovSymbol& f, const Matrix& A, const Matrix& B, const OperatorCertificate& cert);
/// Same, keeping the quadrature order and convergence data.
MatrixIntegral frechet_integral(const MarkovSymbol& f, const Matrix& A, const Matrix& B,
                                const OperatorCertificate& cert);

Matrix fprime_of_A(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert);

/// C_n for n >= 1.
Matrix taylor_coeff(const MarkovSymbol& f, const Matrix& A, const Matrix& B, int n, const OperatorCertificate& cert);

/// C_1 .. C_N from one pass over the quadrature nodes.
std::vector<Matrix> taylor_coeffs(const MarkovSymbol& f, const Matrix& A, const Matrix& B, int N,
                                  const OperatorCertificate& cert);

struct TaylorResult {
    Matrix value;                    // sum_{n=1}^N z^n C_n
    std::vector<Matrix> coefficients;  // C_1 .. C_N
    int terms = 0;
    double radius = 0.0;      // delta_A / ||B||
    double ratio = 0.0;       // q = |z| m_A ||B||
    double tail_bound = 0.0;  // first_moment * m_A * q^{N+1} / (1 - q)
    int quadrature_order = 0;
};

inline constexpr int kMaxTaylorTerms = 64;

/// Smallest N with first_moment * m_A * q^{N+1} / (1 - q) < 1e-10, capped at kMaxTaylorTerms.
int default_taylor_terms(double first_moment, double m_A, double q);

/// Needs a V_[a,b] certificate. terms <= 0 picks default_taylor_terms.
/// Throws RadiusError when |z| >= delta_A / ||B||.
TaylorResult taylor_eval(const MarkovSymbol& f, const Matrix& A, const Matrix& B, cplx z, int terms,
                         const OperatorCertificate& cert);

struct ContinuityProbe {
    double value = 0.0;     // ||(f_{A'}^grad - f_A^grad)(B)||_I / ||B||_I
    double bound = 0.0;     // 8 m_A^4 first_moment ||A' - A||_I
    double distance = 0.0;  // ||A' - A||_I
    double window = 0.0;    // 1 / (2 m_A)
    bool in_window = false;
    bool holds = false;     // meaningful only in_window
};

ContinuityProbe frechet_continuity_probe(const MarkovSymbol& f, const Matrix& A, const Matrix& A2, const Matrix& B,
                                         IdealNorm which, const OperatorCertificate& cert);

struct FiniteDifferenceCheck {
    std::vector<double> steps;
    std::vector<double> errors;  // ||f(A + hB) - f(A) - h f_A^grad(B)||
    double slope = 0.0;          // least-squares slope of log error against log h
    int quadrature_order = 0;
};

/// Every evaluation uses one fixed quadrature rule so that its error cancels.
FiniteDifferenceCheck frechet_fd_check(const MarkovSymbol& f, const Matrix& A, const Matrix& B,
                                       const OperatorCertificate& cert,
                                       const std::vector<double>& steps = {1e-3, 1e-4, 1e-5, 1e-6});

/// ||R(t, A + D) - R(t, A)|| against ||D|| ||R||^2 / (1 - ||D|| ||R||), for ||D|| ||R(t, A)|| < 1.
struct ResolventPerturbation {
    double lhs = 0.0;
    double rhs = 0.0;
    double product = 0.0;  // ||D|| ||R(t, A)||
};
ResolventPerturbation resolvent_perturbation(const Matrix& A, const Matrix& D, cplx t);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace opcalc
