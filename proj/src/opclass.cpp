#include "opcalc/opclass.hpp"

#include "opcalc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace opcalc {

bool OperatorCertificate::covers(double lo, double hi) const
{
    const double slack = 1e-12 * (1.0 + std::abs(b));
    if (hi > b + slack) return false;
    if (kind == CertificateKind::V0b) return lo >= 0.0;
    return lo >= a - slack;
}

double spectrum_distance(const Matrix& A, double lo, double hi)
{
    const Eigen::ComplexEigenSolver<Matrix> solver(A, false);
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const cplx l = solver.eigenvalues()(i);
        const double x = std::clamp(l.real(), lo, hi);
        d = std::min(d, std::abs(l - cplx(x, 0.0)));
    }
    return d;
}

namespace {

void reject_eigenvalues_in(const Matrix& A, double lo, double hi, bool open_left)
{
    const Eigen::ComplexEigenSolver<Matrix> solver(A, false);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const cplx l = solver.eigenvalues()(i);
        const double tol = 1e-10 * (1.0 + std::abs(l));
        if (std::abs(l.imag()) > tol) continue;
        const bool above_lo = open_left ? l.real() > lo + tol : l.real() >= lo - tol;
        if (above_lo && l.real() <= hi + tol) {
            std::ostringstream os;
            os << "eigenvalue " << l << " lies in " << (open_left ? "(" : "[") << lo << ", " << hi << "]";
            throw NotInClass(os.str(), l);
        }
    }
}

struct Peak {
    double x;
    double value;
};

// Golden-section maximization of f on [lo, hi] (in the variable x).
Peak golden_max(const std::function<double(double)>& f, double lo, double hi, double rel_tol)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 200 && (hi - lo) > rel_tol * (std::abs(lo) + std::abs(hi) + 1e-300); ++it) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? Peak{x1, f1} : Peak{x2, f2};
}

// Maximizes f over the sorted grid, then refines inside the neighbouring cells.
Peak refine_grid_max(const std::vector<double>& grid, const std::vector<double>& values,
                     const std::function<double(double)>& f)
{
    const auto it = std::max_element(values.begin(), values.end());
    const std::size_t k = static_cast<std::size_t>(it - values.begin());
    Peak best{grid[k], *it};
    if (grid.size() < 2) return best;
    const double lo = grid[k == 0 ? 0 : k - 1];
    const double hi = grid[std::min(k + 1, grid.size() - 1)];
    const Peak refined = golden_max(f, lo, hi, 1e-10);
    if (refined.value > best.value) best = refined;
    return best;
}

}  // namespace

OperatorCertificate certify_V0b(const Matrix& A, double b, std::size_t grid_size, std::string matrix_id)
{
    require_square(A, "certify_V0b");
    if (!(b > 0.0)) throw InvalidArgument("certify_V0b: b must be positive");
    if (grid_size < 4) throw InvalidArgument("certify_V0b: grid_size must be >= 4");
    reject_eigenvalues_in(A, 0.0, b, true);

    OperatorCertificate cert;
    cert.kind = CertificateKind::V0b;
    cert.matrix_id = std::move(matrix_id);
    cert.a = 0.0;
    cert.b = b;
    cert.dim = static_cast<std::size_t>(A.rows());
    cert.margin = std::numeric_limits<double>::infinity();
    cert.spectral_distance = spectrum_distance(A, 0.0, b);

    const double eps = 1e-8 * b;
    const double log_lo = std::log(eps);
    const double log_hi = std::log(b);
    auto envelope_at = [&](double log_t) {
        const double t = std::exp(log_t);
        try {
            const ResolventSolve rs = resolvent_with_condition(A, t);
            cert.margin = std::min(cert.margin, rs.rcond);
            return t * op_norm(rs.R);
        } catch (const SpectrumHit&) {
            // LU gave up (defective eigenvalue at 0): ||R|| = 1/sigma_min still works
            Matrix shifted = -A;
            shifted.diagonal().array() += t;
            const double smin = singular_values(shifted).minCoeff();
            if (!(smin > 0.0)) throw NotInClass("certify_V0b: tI - A is singular at t = " + std::to_string(t), t);
            cert.margin = 0.0;
            return t / smin;
        }
    };

    std::vector<double> xs(grid_size);
    std::vector<double> ys(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        xs[i] = log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
        ys[i] = envelope_at(xs[i]);
        cert.grid.push_back(std::exp(xs[i]));
    }
    const Peak peak = refine_grid_max(xs, ys, envelope_at);
    cert.rising_at_cutoff = ys[0] > ys[1] * (1.0 + 1e-12);
    cert.argmax_t = std::exp(peak.x);
    cert.M_A = peak.value * (1.0 + 1e-6);
    return cert;
}

OperatorCertificate certify_Vab(const Matrix& A, double a, double b, std::size_t grid_size, std::string matrix_id)
{
    require_square(A, "certify_Vab");
    if (!(a >= 0.0) || !(b > a)) throw InvalidArgument("certify_Vab: need 0 <= a < b");
    if (grid_size < 4) throw InvalidArgument("certify_Vab: grid_size must be >= 4");
    reject_eigenvalues_in(A, a, b, false);

    OperatorCertificate cert;
    cert.kind = CertificateKind::Vab;
    cert.matrix_id = std::move(matrix_id);
    cert.a = a;
    cert.b = b;
    cert.dim = static_cast<std::size_t>(A.rows());
    cert.margin = std::numeric_limits<double>::infinity();
    cert.spectral_distance = spectrum_distance(A, a, b);

    auto resolvent_norm = [&](double t) {
        const ResolventSolve rs = resolvent_with_condition(A, t);
        cert.margin = std::min(cert.margin, rs.rcond);
        return op_norm(rs.R);
    };
    std::vector<double> ys(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        cert.grid.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_size - 1));
        ys[i] = resolvent_norm(cert.grid.back());
    }
    const Peak peak = refine_grid_max(cert.grid, ys, resolvent_norm);
    cert.argmax_t = peak.x;
    cert.m_A = peak.value;
    cert.delta_A = 1.0 / cert.m_A;
    return cert;
}

double perturbation_budget(const OperatorCertificate& cert)
{
    if (cert.kind != CertificateKind::Vab)
        throw InvalidArgument("perturbation_budget: needs a V_[a,b] certificate");
    return cert.delta_A;
}

Matrix ritt_inverse_plus_identity(const Matrix& T)
{
    require_square(T, "ritt_inverse_plus_identity");
    Eigen::PartialPivLU<Matrix> lu(T);
    if (!(lu.rcond() > 1e-14)) throw InvalidArgument("ritt_inverse_plus_identity: T is not invertible");
    return lu.inverse() + Matrix::Identity(T.rows(), T.cols());
}

}  // namespace opcalc
