#include "opcalc/frechet.hpp"

#include "opcalc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace opcalc {

namespace {

std::vector<cplx> spectrum_of(const Matrix& A)
{
    const Eigen::ComplexEigenSolver<Matrix> es(A, false);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

void check_inputs(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert, const char* who)
{
    require_square(A, who);
    require_covers(f, cert);
    if (cert.dim != 0 && cert.dim != static_cast<std::size_t>(A.rows()))
        throw CertificateMismatch(std::string(who) + ": certificate was issued for a matrix of another dimension");
}

void check_direction(const Matrix& A, const Matrix& B, const char* who)
{
    if (B.rows() != A.rows() || B.cols() != A.cols())
        throw InvalidArgument(std::string(who) + ": direction must have the shape of A");
    if (!B.allFinite()) throw InvalidArgument(std::string(who) + ": direction has non-finite entries");
}

Matrix frechet_integrand(const Matrix& A, const Matrix& B, double t)
{
    const Matrix R = resolvent(A, t);
    return (R * B * R) * t;
}

}  // namespace

MatrixIntegral frechet_integral(const MarkovSymbol& f, const Matrix& A, const Matrix& B,
                                const OperatorCertificate& cert)
{
    check_inputs(f, A, cert, "frechet_derivative");
    check_direction(A, B, "frechet_derivative");
    return integrate_adaptive(
        f.measure(), spectrum_of(A), [&](double t) { return std::vector<Matrix>{frechet_integrand(A, B, t)}; }, 1,
        A.rows());
}

Matrix frechet_derivative(const MarkovSymbol& f, const Matrix& A, const Matrix& B, const OperatorCertificate& cert)
{
    return frechet_integral(f, A, B, cert).values.front();
}

Matrix fprime_of_A(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert)
{
    check_inputs(f, A, cert, "fprime_of_A");
    return integrate_adaptive(
               f.measure(), spectrum_of(A),
               [&](double t) {
                   const Matrix R = resolvent(A, t);
                   return std::vector<Matrix>{(R * R) * t};
               },
               1, A.rows())
        .values.front();
}

namespace {

MatrixIntegral coefficient_integral(const MarkovSymbol& f, const Matrix& A, const Matrix& B, int N)
{
    const auto count = static_cast<std::size_t>(N);
    return integrate_adaptive(
        f.measure(), spectrum_of(A),
        [&](double t) {
            const Matrix R = resolvent(A, t);
            const Matrix RB = R * B;
            std::vector<Matrix> out;
            out.reserve(count);
            Matrix P = RB * R;  // (R B)^1 R
            for (std::size_t k = 0; k < count; ++k) {
                out.push_back(P * t);
                if (k + 1 < count) P = RB * P;
            }
            return out;
        },
        count, A.rows());
}

}  // namespace

std::vector<Matrix> taylor_coeffs(const MarkovSymbol& f, const Matrix& A, const Matrix& B, int N,
                                  const OperatorCertificate& cert)
{
    check_inputs(f, A, cert, "taylor_coeffs");
    check_direction(A, B, "taylor_coeffs");
    if (N < 1) throw InvalidArgument("taylor_coeffs: need N >= 1");
    return coefficient_integral(f, A, B, N).values;
}

Matrix taylor_coeff(const MarkovSymbol& f, const Matrix& A, const Matrix& B, int n, const OperatorCertificate& cert)
{
    if (n < 1) throw InvalidArgument("taylor_coeff: need n >= 1");
    return taylor_coeffs(f, A, B, n, cert).back();
}

int default_taylor_terms(double first_moment, double m_A, double q)
{
    if (!(q < 1.0)) return kMaxTaylorTerms;
    if (q <= 0.0) return 1;
    for (int N = 1; N <= kMaxTaylorTerms; ++N)
        if (first_moment * m_A * std::pow(q, N + 1) / (1.0 - q) < 1e-10) return N;
    return kMaxTaylorTerms;
}

TaylorResult taylor_eval(const MarkovSymbol& f, const Matrix& A, const Matrix& B, cplx z, int terms,
                         const OperatorCertificate& cert)
{
    check_inputs(f, A, cert, "taylor_eval");
    check_direction(A, B, "taylor_eval");
    if (cert.kind != CertificateKind::Vab)
        throw CertificateMismatch("taylor_eval: the convergence radius needs a V_[a,b] certificate (m_A)");
    if (terms > kMaxTaylorTerms) throw InvalidArgument("taylor_eval: at most 64 terms");

    TaylorResult out;
    const double bn = op_norm(B);
    out.radius = bn > 0.0 ? cert.delta_A / bn : std::numeric_limits<double>::infinity();
    if (!(std::abs(z) < out.radius)) {
        std::ostringstream os;
        os << "taylor_eval: |z| = " << std::abs(z) << " is outside the disc of convergence |z| < delta_A/||B|| = "
           << out.radius;
        throw RadiusError(os.str(), out.radius);
    }
    out.ratio = std::abs(z) * cert.m_A * bn;
    const double mu1 = first_moment(f.measure());
    out.terms = terms > 0 ? terms : default_taylor_terms(mu1, cert.m_A, out.ratio);
    out.tail_bound = mu1 * cert.m_A * std::pow(out.ratio, out.terms + 1) / (1.0 - out.ratio);

    const Eigen::Index n = A.rows();
    out.value = Matrix::Zero(n, n);
    if (z == cplx(0.0, 0.0)) {
        out.coefficients.assign(static_cast<std::size_t>(out.terms), Matrix::Zero(n, n));
        return out;
    }
    // Inside the disc A + zB cannot reach [a, b]; a hit would mean a broken certificate.
    for (cplx l : spectrum_of(A + z * B)) {
        const double x = std::clamp(l.real(), cert.a, cert.b);
        if (std::abs(l - cplx(x, 0.0)) <= 1e-12 * (1.0 + std::abs(l))) {
            std::ostringstream os;
            os << "taylor_eval: A + zB has the eigenvalue " << l << " in [" << cert.a << ", " << cert.b << "]";
            throw NotInClass(os.str(), l);
        }
    }
    const MatrixIntegral mi = coefficient_integral(f, A, B, out.terms);
    out.coefficients = mi.values;
    out.quadrature_order = mi.order;
    cplx zn = 1.0;
    for (const Matrix& C : out.coefficients) {
        zn *= z;
        out.value += zn * C;
    }
    return out;
}

ContinuityProbe frechet_continuity_probe(const MarkovSymbol& f, const Matrix& A, const Matrix& A2, const Matrix& B,
                                         IdealNorm which, const OperatorCertificate& cert)
{
    check_inputs(f, A, cert, "frechet_continuity_probe");
    check_direction(A, A2, "frechet_continuity_probe");
    check_direction(A, B, "frechet_continuity_probe");
    if (cert.kind != CertificateKind::Vab)
        throw CertificateMismatch("frechet_continuity_probe: needs a V_[a,b] certificate (m_A)");
    ContinuityProbe p;
    p.distance = norm(A2 - A, which);
    p.window = 0.5 / cert.m_A;
    p.in_window = p.distance < p.window;
    const double bn = norm(B, which);
    if (bn == 0.0 || p.distance == 0.0) {
        p.holds = true;
        p.bound = 8.0 * std::pow(cert.m_A, 4) * first_moment(f.measure()) * p.distance;
        return p;
    }
    std::vector<cplx> sing = spectrum_of(A);
    for (cplx l : spectrum_of(A2)) sing.push_back(l);
    // Both derivatives on the same nodes: their quadrature errors cancel in the difference.
    const MatrixIntegral mi = integrate_adaptive(
        f.measure(), sing,
        [&](double t) { return std::vector<Matrix>{frechet_integrand(A2, B, t) - frechet_integrand(A, B, t)}; }, 1,
        A.rows());
    p.value = norm(mi.values.front(), which) / bn;
    p.bound = 8.0 * std::pow(cert.m_A, 4) * first_moment(f.measure()) * p.distance;
    p.holds = p.value <= p.bound * (1.0 + 1e-8) + 1e-14;
    return p;
}

FiniteDifferenceCheck frechet_fd_check(const MarkovSymbol& f, const Matrix& A, const Matrix& B,
                                       const OperatorCertificate& cert, const std::vector<double>& steps)
{
    check_inputs(f, A, cert, "frechet_fd_check");
    check_direction(A, B, "frechet_fd_check");
    if (steps.size() < 2) throw InvalidArgument("frechet_fd_check: need at least two steps");
    const std::vector<cplx> sing = spectrum_of(A);
    const MatrixIntegral probe = integrate_adaptive(
        f.measure(), sing, [&](double t) { return std::vector<Matrix>{frechet_integrand(A, B, t)}; }, 1, A.rows());

    RuleOptions ro;
    ro.order = probe.order;
    ro.singularities = sing;
    const QuadratureRule rule = build_rule(f.measure(), ro);
    const Matrix F =
        integrate_family(rule, [&](double t) { return std::vector<Matrix>{frechet_integrand(A, B, t)}; }, 1, A.rows())
            .front();
    const Matrix fA = apply_on_rule(rule, A);

    FiniteDifferenceCheck out;
    out.quadrature_order = probe.order;
    for (double h : steps) {
        if (!(h > 0.0)) throw InvalidArgument("frechet_fd_check: steps must be positive");
        const Matrix fh = apply_on_rule(rule, A + h * B);
        out.steps.push_back(h);
        out.errors.push_back(op_norm(fh - fA - h * F));
    }
    out.slope = log_log_slope(out.steps, out.errors);
    return out;
}

ResolventPerturbation resolvent_perturbation(const Matrix& A, const Matrix& D, cplx t)
{
    require_square(A, "resolvent_perturbation");
    check_direction(A, D, "resolvent_perturbation");
    const Matrix R = resolvent(A, t);
    ResolventPerturbation r;
    const double dn = op_norm(D);
    const double rn = op_norm(R);
    r.product = dn * rn;
    if (!(r.product < 1.0))
        throw InvalidArgument("resolvent_perturbation: needs ||D|| ||R(t, A)|| < 1");
    r.lhs = op_norm(resolvent(A + D, t) - R);
    r.rhs = dn * rn * rn / (1.0 - r.product);
    return r;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("log_log_slope: need two or more points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace opcalc
