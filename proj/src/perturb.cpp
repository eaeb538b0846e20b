#include "opcalc/perturb.hpp"

#include "opcalc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opcalc {

const char* to_string(BoundId id) noexcept
{
    switch (id) {
        case BoundId::thm1: return "thm1";
        case BoundId::thm2: return "thm2";
        case BoundId::thm3: return "thm3";
        case BoundId::cor1: return "cor1";
        case BoundId::cor2: return "cor2";
        case BoundId::cor4: return "cor4";
    }
    return "?";
}

BoundReport make_report(BoundId id, double lhs, double rhs)
{
    BoundReport r;
    r.bound_id = id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tolerance = 1e-8 * (1.0 + std::abs(rhs));
    r.holds = lhs <= rhs + r.tolerance;
    return r;
}

namespace {

void require_v0b(const MarkovSymbol& f, const OperatorCertificate& cert, const char* who)
{
    if (cert.kind != CertificateKind::V0b)
        throw CertificateMismatch(std::string(who) + ": needs a V_(0,b] certificate");
    require_covers(f, cert);
}

// -f(-s) for s >= 0, real part (f is real on the negative axis).
double neg_f_at_minus(const MarkovSymbol& f, double s)
{
    if (s == 0.0) return 0.0;
    return -f.eval(cplx(-s, 0.0)).real();
}

void record_common(BoundReport& r, const MarkovSymbol& f)
{
    r.constants["symbol"] = f.name();
    r.constants["support_b"] = f.support_hi();
}

void record_cert(BoundReport& r, const std::string& key, const OperatorCertificate& c)
{
    r.constants[key] = c.M_A;
    r.constants[key + "_argmax_t"] = c.argmax_t;
    if (!c.matrix_id.empty()) r.constants[key + "_matrix"] = c.matrix_id;
}

Matrix checked_apply(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert, int& order)
{
    const ApplyResult r = apply_detailed(f, A, cert);
    order = std::max(order, r.order);
    return r.value;
}

}  // namespace

BoundReport bound_thm1(const MarkovSymbol& f, const Matrix& A, const Matrix& B, const PairCertificates& certs)
{
    require_v0b(f, certs.A, "bound_thm1");
    require_v0b(f, certs.B, "bound_thm1");
    int order = 0;
    const Matrix D = checked_apply(f, A, certs.A, order) - checked_apply(f, B, certs.B, order);
    const double dist = op_norm(A - B);
    const double C = certs.A.M_A + certs.B.M_A + certs.A.M_A * certs.B.M_A;
    const double nf = neg_f_at_minus(f, dist);
    BoundReport r = make_report(BoundId::thm1, op_norm(D), C * nf);
    record_common(r, f);
    record_cert(r, "M_A", certs.A);
    record_cert(r, "M_B", certs.B);
    r.constants["norm_A_minus_B"] = dist;
    r.constants["f_at_minus_norm"] = -nf;
    r.constants["ideal"] = std::string("op");
    r.constants["quadrature_order"] = static_cast<double>(order);
    return r;
}

BoundReport bound_thm2_pointwise(const MarkovSymbol& f, const Matrix& A, const Matrix& B, const Vector& x,
                                 const PairCertificates& certs)
{
    require_v0b(f, certs.A, "bound_thm2");
    require_v0b(f, certs.B, "bound_thm2");
    if (x.size() != A.rows()) throw InvalidArgument("bound_thm2: vector length does not match the matrix");
    const Matrix Delta = A - B;
    const double dnorm = op_norm(Delta);

    // The hypothesis is needed at every t where R(t, B) enters the integral.
    std::vector<cplx> sing;
    {
        const Eigen::ComplexEigenSolver<Matrix> es(B, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) sing.push_back(es.eigenvalues()(i));
    }
    RuleOptions ro;
    ro.singularities = sing;
    const QuadratureRule rule = build_rule(f.measure(), ro);
    double worst = 0.0;
    for (const QuadratureNode& node : rule.nodes) {
        const Matrix R = resolvent(B, node.t);
        const double comm = op_norm(Delta * R - R * Delta);
        const double scale = dnorm * op_norm(R);
        if (comm > 1e-10 * scale) {
            std::ostringstream os;
            os << "bound_thm2: A - B does not commute with R(t, B) at t = " << node.t << " (commutator " << comm
               << " > 1e-10 * " << scale << ")";
            throw PreconditionError(os.str());
        }
        if (scale > 0.0) worst = std::max(worst, comm / scale);
    }

    int order = 0;
    const Matrix D = checked_apply(f, A, certs.A, order) - checked_apply(f, B, certs.B, order);
    const double dx = (Delta * x).norm();
    const double C = certs.A.M_A + certs.B.M_A + certs.A.M_A * certs.B.M_A;
    const double nf = neg_f_at_minus(f, dx);
    BoundReport r = make_report(BoundId::thm2, (D * x).norm(), C * nf);
    record_common(r, f);
    record_cert(r, "M_A", certs.A);
    record_cert(r, "M_B", certs.B);
    r.constants["norm_x"] = x.norm();
    r.constants["norm_A_minus_B_x"] = dx;
    r.constants["commutator_relative_max"] = worst;
    r.constants["commutation_nodes"] = static_cast<double>(rule.nodes.size());
    r.constants["quadrature_order"] = static_cast<double>(order);
    return r;
}

BoundReport bound_thm3_ideal(const MarkovSymbol& f, const Matrix& A, const Matrix& B, IdealNorm which,
                             const PairCertificates& certs)
{
    require_v0b(f, certs.A, "bound_thm3");
    require_v0b(f, certs.B, "bound_thm3");
    int order = 0;
    const Matrix D = checked_apply(f, A, certs.A, order) - checked_apply(f, B, certs.B, order);
    const double fp0 = f.derivative_at_zero();
    const double dist = norm(A - B, which);
    BoundReport r = make_report(BoundId::thm3, norm(D, which), certs.A.M_A * certs.B.M_A * fp0 * dist);
    record_common(r, f);
    record_cert(r, "M_A", certs.A);
    record_cert(r, "M_B", certs.B);
    r.constants["f_prime_at_zero"] = fp0;
    r.constants["ideal"] = which.name();
    r.constants["ideal_norm_A_minus_B"] = dist;
    r.constants["quadrature_order"] = static_cast<double>(order);
    return r;
}

MomentReports moment_inequalities(const MarkovSymbol& f, const Matrix& A, const Vector& x,
                                  const OperatorCertificate& cert)
{
    require_v0b(f, cert, "moment_inequalities");
    if (x.size() != A.rows()) throw InvalidArgument("moment_inequalities: vector length does not match the matrix");
    const double xn = x.norm();
    if (!(xn > 0.0)) throw InvalidArgument("moment_inequalities: x must be non-zero");
    const Vector u = x / xn;

    int order = 0;
    const Matrix F = checked_apply(f, A, cert, order);
    const double lhs = (F * u).norm();
    const double ax = (A * u).norm();
    const double c = 2.0 * cert.M_A + 1.0;
    const double nf = neg_f_at_minus(f, ax);
    const double fp0 = f.derivative_at_zero();

    MomentReports out;
    out.cor1 = make_report(BoundId::cor1, lhs, c * nf);
    out.cor2 = make_report(BoundId::cor2, lhs, c * fp0 * ax);
    for (BoundReport* r : {&out.cor1, &out.cor2}) {
        record_common(*r, f);
        record_cert(*r, "M_A", cert);
        r->constants["input_norm_x"] = xn;
        r->constants["norm_Ax"] = ax;
        r->constants["quadrature_order"] = static_cast<double>(order);
    }
    out.cor1.constants["f_at_minus_norm_Ax"] = -nf;
    out.cor2.constants["f_prime_at_zero"] = fp0;
    out.ordered = out.cor1.rhs <= out.cor2.rhs + 1e-12 * (1.0 + std::abs(out.cor2.rhs));
    return out;
}

BoundReport commutator_bound(const MarkovSymbol& f, const Matrix& A, const Matrix& U, IdealNorm which,
                             const OperatorCertificate& cert)
{
    require_v0b(f, cert, "commutator_bound");
    require_square(U, "commutator_bound");
    if (U.rows() != A.rows()) throw InvalidArgument("commutator_bound: U and A differ in size");
    const Eigen::VectorXd sv = singular_values(U);
    if (!(sv.minCoeff() > 1e-14 * sv.maxCoeff())) throw PreconditionError("commutator_bound: U is singular");
    const Matrix Uinv = Eigen::PartialPivLU<Matrix>(U).inverse();
    const Eigen::Index n = A.rows();
    const double unitary_defect = op_norm(U.adjoint() * U - Matrix::Identity(n, n));
    const bool unitary = unitary_defect <= 1e-12;

    const Matrix C = U * A * Uinv;
    OperatorCertificate cc;
    try {
        cc = certify_V0b(C, cert.b, cert.grid.empty() ? kDefaultCertificateGrid : cert.grid.size(), "UAU^-1");
    } catch (const NotInClass& e) {
        throw PreconditionError(std::string("commutator_bound: U A U^-1 leaves V_(0,b]: ") + e.what());
    }

    int order = 0;
    const Matrix F = checked_apply(f, A, cert, order);
    const double lhs = norm(F * U - U * F, which);
    const double comm = norm(A * U - U * A, which);
    const double fp0 = f.derivative_at_zero();
    double rhs = 0.0;
    if (unitary) {
        rhs = cert.M_A * cert.M_A * fp0 * comm;
    } else {
        rhs = cert.M_A * cc.M_A * fp0 * comm * op_norm(U) * op_norm(Uinv);
    }
    BoundReport r = make_report(BoundId::cor4, lhs, rhs);
    record_common(r, f);
    record_cert(r, "M_A", cert);
    r.constants["M_UAU^-1"] = cc.M_A;
    r.constants["unitary"] = std::string(unitary ? "yes" : "no");
    r.constants["unitary_defect"] = unitary_defect;
    r.constants["f_prime_at_zero"] = fp0;
    r.constants["ideal"] = which.name();
    r.constants["ideal_norm_commutator_A_U"] = comm;
    r.constants["quadrature_order"] = static_cast<double>(order);
    if (!unitary) {
        r.constants["norm_U"] = op_norm(U);
        r.constants["norm_U_inverse"] = op_norm(Uinv);
    }
    return r;
}

SweepReport stability_sweep(const MarkovSymbol& f, const std::vector<std::pair<Matrix, Matrix>>& pairs,
                            IdealNorm which, double constant_cap)
{
    SweepReport rep;
    const double b = f.support_hi();
    const double fp0 = f.derivative_at_zero();
    for (const auto& [A, B] : pairs) {
        const OperatorCertificate ca = certify_V0b(A, b);
        const OperatorCertificate cb = certify_V0b(B, b);
        if (ca.M_A > constant_cap || cb.M_A > constant_cap) {
            std::ostringstream os;
            os << "stability_sweep: certified constant " << std::max(ca.M_A, cb.M_A) << " exceeds the cap "
               << constant_cap;
            throw InvalidArgument(os.str());
        }
        SweepEntry e;
        e.M_A = ca.M_A;
        e.M_B = cb.M_A;
        e.distance = norm(A - B, which);
        e.lhs = norm(apply(f, A, ca) - apply(f, B, cb), which);
        e.ratio = e.distance > 0.0 ? e.lhs / e.distance : 0.0;
        e.bound = ca.M_A * cb.M_A * fp0;
        rep.uniform_constant = std::max({rep.uniform_constant, ca.M_A, cb.M_A});
        rep.entries.push_back(e);
    }
    const double cap = rep.uniform_constant * rep.uniform_constant * fp0;
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        const SweepEntry& e = rep.entries[i];
        if (e.ratio > cap * (1.0 + 1e-8) + 1e-12) rep.ratios_bounded = false;
        if (i > 0) {
            const SweepEntry& p = rep.entries[i - 1];
            if (e.distance < p.distance && e.lhs > p.lhs * (1.0 + 1e-8) + 1e-14) rep.decays = false;
        }
    }
    return rep;
}

std::vector<ContinuityEntry> continuity_sweep(const std::vector<MarkovSymbol>& symbols, const Matrix& A,
                                              const OperatorCertificate& cert)
{
    std::vector<ContinuityEntry> out;
    for (const MarkovSymbol& f : symbols) {
        require_v0b(f, cert, "continuity_sweep");
        ContinuityEntry e;
        e.derivative_at_zero = f.derivative_at_zero();
        e.mass = total_mass(f.measure());
        e.norm = op_norm(apply(f, A, cert));
        e.mass_bound = (1.0 + cert.M_A) * e.mass;
        e.derivative_bound = (1.0 + cert.M_A) * f.support_hi() * e.derivative_at_zero;
        e.holds = e.norm <= e.mass_bound + 1e-8 * (1.0 + e.mass_bound) &&
                  e.mass_bound <= e.derivative_bound + 1e-12 * (1.0 + e.derivative_bound);
        out.push_back(e);
    }
    return out;
}

double min_inequality_slack(double a, double d, double t)
{
    if (!(a > 0.0 && d > 0.0 && t > 0.0)) throw InvalidArgument("min_inequality_slack: a, d, t must be positive");
    return (1.0 + a * d) / (t + d) - std::min(a, 1.0 / t);
}

}  // namespace opcalc
