#pragma once

// Perturbation bounds for f in ZR(0,b] and operators in V_(0,b]:
//   thm1   ||f(A) - f(B)||      <= -(M_A + M_B + M_A M_B) f(-||A - B||)
//   thm2   ||(f(A) - f(B)) x||  <= -(M_A + M_B + M_A M_B) f(-||(A - B) x||)   (A - B commutes with R(t, B))
//   thm3   ||f(A) - f(B)||_I    <= M_A M_B f'(-0) ||A - B||_I
//   cor1   ||f(A) x||           <= -(2 M_A + 1) f(-||A x||)                   (||x|| = 1)
//   cor2   ||f(A) x||           <= (2 M_A + 1) f'(-0) ||A x||
//   cor4   ||[f(A), U]||_I      <= M_A^2 f'(-0) ||[A, U]||_I                  (U unitary)
// Every report carries both sides, the slack and the constants used.

#include "opcalc/funcalc.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace opcalc {

enum class BoundId { thm1, thm2, thm3, cor1, cor2, cor4 };

const char* to_string(BoundId id) noexcept;

using ConstantValue = std::variant<double, std::string>;

struct BoundReport {
    BoundId bound_id = BoundId::thm1;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
    double tolerance = 0.0;
    std::map<std::string, ConstantValue> constants;
};

/// holds <=> lhs <= rhs + 1e-8 (1 + rhs)
BoundReport make_report(BoundId id, double lhs, double rhs);

/// Certificates of the two operators of a pair on the same (0, b].
struct PairCertificates {
    OperatorCertificate A;
    OperatorCertificate B;
};

BoundReport bound_thm1(const MarkovSymbol& f, const Matrix& A, const Matrix& B, const PairCertificates& certs);

/// Throws PreconditionError unless ||[A - B, R(t, B)]|| <= 1e-10 ||A - B|| ||R(t, B)|| at every quadrature node.
BoundReport bound_thm2_pointwise(const MarkovSymbol& f, const Matrix& A, const Matrix& B, const Vector& x,
                                 const PairCertificates& certs);

BoundReport bound_thm3_ideal(const MarkovSymbol& f, const Matrix& A, const Matrix& B, IdealNorm which,
                             const PairCertificates& certs);

struct MomentReports {
    BoundReport cor1;
    BoundReport cor2;
    bool ordered = false;  // rhs(cor1) <= rhs(cor2) within tolerance
};

/// x is normalized internally; throws InvalidArgument for x = 0.
MomentReports moment_inequalities(const MarkovSymbol& f, const Matrix& A, const Vector& x,
                                  const OperatorCertificate& cert);

/// For unitary U the bound is M_A^2 f'(-0) ||[A, U]||_I. For a general
/// invertible U the report uses M_A M_{UAU^-1} f'(-0) ||[A, U]||_I ||U|| ||U^-1||,
/// which the same argument gives and which reduces to the former when U is unitary.
/// Throws PreconditionError when U is singular or UAU^{-1} leaves V_(0,b].
BoundReport commutator_bound(const MarkovSymbol& f, const Matrix& A, const Matrix& U, IdealNorm which,
                             const OperatorCertificate& cert);

struct SweepEntry {
    double distance = 0.0;  // ||A_n - B_n||_I
    double lhs = 0.0;       // ||f(A_n) - f(B_n)||_I
    double ratio = 0.0;     // lhs / distance (0 when distance = 0)
    double bound = 0.0;     // M_{A_n} M_{B_n} f'(-0)
    double M_A = 0.0;
    double M_B = 0.0;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    double uniform_constant = 0.0;  // max over n of M_{A_n}, M_{B_n}
    bool ratios_bounded = true;     // ratio_n <= M^2 f'(-0) for the uniform M
    bool decays = true;             // lhs decreases whenever the distance decreases
};

/// Stability of the calculus along a sequence of pairs. Throws InvalidArgument
/// when the certified constants exceed constant_cap (they must stay bounded).
SweepReport stability_sweep(const MarkovSymbol& f, const std::vector<std::pair<Matrix, Matrix>>& pairs,
                            IdealNorm which, double constant_cap = 1e6);

struct ContinuityEntry {
    double derivative_at_zero = 0.0;  // f_n'(-0)
    double mass = 0.0;                // tau_n(support)
    double norm = 0.0;                // ||f_n(A)||
    double mass_bound = 0.0;          // (1 + M_A) tau_n
    double derivative_bound = 0.0;    // (1 + M_A) b f_n'(-0)
    bool holds = false;
};

/// ||f_n(A)|| <= (1 + M_A) tau_n <= (1 + M_A) b f_n'(-0) for a family of symbols.
std::vector<ContinuityEntry> continuity_sweep(const std::vector<MarkovSymbol>& symbols, const Matrix& A,
                                              const OperatorCertificate& cert);

/// min{a, 1/t} <= (1 + a d) / (t + d) for a, d, t > 0; returns rhs - lhs.
double min_inequality_slack(double a, double d, double t);

// Randomized suites --------------------------------------------------------

struct SuiteSummary {
    std::string name;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double min_slack = 0.0;          // smallest rhs - lhs seen
    double worst_ratio = 0.0;        // max lhs / rhs
    std::vector<BoundReport> failures;
};

struct SuiteConfig {
    std::size_t trials = 100;
    unsigned long long seed = 7;
    std::size_t min_dim = 2;
    std::size_t max_dim = 6;
    double b = 1.0;
};

/// Random certified instances for thm1, thm3 (given ideal), cor1+cor2 and cor4,
/// with both built-in ZR(0,b] symbols and random atomic measures.
SuiteSummary run_suite(BoundId id, const SuiteConfig& config, IdealNorm which = IdealNorm::op());

}  // namespace opcalc
