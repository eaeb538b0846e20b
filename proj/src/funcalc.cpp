#include "opcalc/funcalc.hpp"

#include "opcalc/errors.hpp"
#include "opcalc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace opcalc {

std::vector<Matrix> integrate_family(const QuadratureRule& rule, const MatrixFamily& integrand, std::size_t count,
                                     Eigen::Index dim, bool parallel)
{
    std::vector<Accumulator<Matrix>> acc;
    acc.reserve(count);
    for (std::size_t k = 0; k < count; ++k) acc.emplace_back(Matrix::Zero(dim, dim));

    const bool worth = parallel && dim >= 16 && rule.nodes.size() >= 16;
    ordered_map(
        rule.nodes.size(), [&](std::size_t i) { return integrand(rule.nodes[i].t); },
        [&](std::size_t i, std::vector<Matrix> values) {
            const QuadratureNode& node = rule.nodes[i];
            if (values.size() != count) throw Error("integrate_family: integrand returned the wrong family size");
            for (std::size_t k = 0; k < count; ++k) {
                if (!values[k].allFinite())
                    throw EvaluationError("non-finite integrand at quadrature node t = " + std::to_string(node.t), node.t);
                acc[k].add(node.weight, values[k]);
            }
        },
        worth);

    std::vector<Matrix> out;
    out.reserve(count);
    for (auto& a : acc) out.push_back(a.result());
    return out;
}

MatrixIntegral integrate_adaptive(const RepresentingMeasure& measure, const std::vector<cplx>& singularities,
                                  const MatrixFamily& integrand, std::size_t count, Eigen::Index dim,
                                  const AdaptiveOptions& options)
{
    RuleOptions ro;
    ro.singularities = singularities;
    ro.order = measure.order();
    QuadratureRule rule = build_rule(measure, ro);

    MatrixIntegral result;
    result.values = integrate_family(rule, integrand, count, dim, options.parallel);
    result.order = ro.order;
    result.graded = rule.graded;
    result.change = std::numeric_limits<double>::infinity();

    // Atoms only: the rule is exact.
    if (measure.densities().empty()) {
        result.change = 0.0;
        result.converged = true;
        return result;
    }
    while (ro.order * 2 <= options.max_order) {
        ro.order *= 2;
        rule = build_rule(measure, ro);
        std::vector<Matrix> next = integrate_family(rule, integrand, count, dim, options.parallel);
        double change = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const double scale = std::max(frobenius(next[k]), 1e-300);
            const double diff = frobenius(next[k] - result.values[k]);
            change = std::max(change, diff == 0.0 ? 0.0 : diff / scale);
        }
        result.values = std::move(next);
        result.order = ro.order;
        result.graded = rule.graded;
        result.change = change;
        if (change <= options.tolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

void require_covers(const MarkovSymbol& f, const OperatorCertificate& cert)
{
    const RepresentingMeasure& m = f.measure();
    double lo = m.support_lo();
    double hi = m.support_hi();
    if (m.densities().empty() && !m.atoms().empty()) {
        lo = hi = m.atoms().front().position;
        for (const Atom& atom : m.atoms()) {
            lo = std::min(lo, atom.position);
            hi = std::max(hi, atom.position);
        }
    }
    if (!cert.covers(lo, hi)) {
        std::ostringstream os;
        os << "certificate on " << (cert.kind == CertificateKind::V0b ? "(" : "[") << cert.a << ", " << cert.b
           << "] does not cover the support [" << lo << ", " << hi << "] of symbol " << f.name();
        throw CertificateMismatch(os.str());
    }
}

namespace {

std::vector<cplx> eigenvalues_of(const Matrix& A)
{
    const Eigen::ComplexEigenSolver<Matrix> solver(A, false);
    std::vector<cplx> out(static_cast<std::size_t>(A.rows()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

Matrix stabilized_integrand(const Matrix& A, double t)
{
    Matrix G = resolvent(A, t) * t;
    G.diagonal().array() -= 1.0;
    return G;
}

}  // namespace

ApplyResult apply_detailed(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert,
                           const AdaptiveOptions& options)
{
    require_square(A, "apply");
    require_covers(f, cert);
    if (static_cast<std::size_t>(A.rows()) != cert.dim && cert.dim != 0)
        throw CertificateMismatch("apply: certificate was issued for a matrix of another dimension");
    const Eigen::Index n = A.rows();
    const MatrixIntegral r = integrate_adaptive(
        f.measure(), eigenvalues_of(A), [&](double t) { return std::vector<Matrix>{stabilized_integrand(A, t)}; }, 1, n,
        options);
    return {r.values.front(), r.order, r.change, r.converged};
}

Matrix apply(const MarkovSymbol& f, const Matrix& A, const OperatorCertificate& cert)
{
    return apply_detailed(f, A, cert).value;
}

Matrix apply_on_rule(const QuadratureRule& rule, const Matrix& A)
{
    require_square(A, "apply_on_rule");
    return integrate_family(rule, [&](double t) { return std::vector<Matrix>{stabilized_integrand(A, t)}; }, 1,
                            A.rows())
        .front();
}

Matrix oracle_eig(const MarkovSymbol& f, const Matrix& A)
{
    const EigenDecomposition ed = eig(A);
    if (ed.ill_conditioned) {
        std::ostringstream os;
        os << "oracle_eig: eigenbasis condition " << ed.condition << " >= 1e6 (defective or ill-conditioned)";
        throw OracleRefused(os.str());
    }
    Vector fl(ed.values.size());
    for (Eigen::Index i = 0; i < ed.values.size(); ++i) fl(i) = f.eval_reference(ed.values(i));
    const Eigen::PartialPivLU<Matrix> lu(ed.vectors);
    return ed.vectors * fl.asDiagonal() * lu.inverse();
}

namespace {

struct SupportHull {
    double lo;
    double hi;
};

SupportHull support_hull(const RepresentingMeasure& m)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    if (!m.densities().empty()) {
        lo = m.support_lo();
        hi = m.support_hi();
    }
    for (const Atom& atom : m.atoms()) {
        lo = std::min(lo, atom.position);
        hi = std::max(hi, atom.position);
    }
    if (lo > hi) lo = hi = m.support_hi();
    return {lo, hi};
}

bool support_inside(const RepresentingMeasure& m, const ContourSpec& c)
{
    if (!m.densities().empty() && !(c.encloses(m.support_lo()) && c.encloses(m.support_hi()))) return false;
    return std::all_of(m.atoms().begin(), m.atoms().end(), [&](const Atom& a) { return c.encloses(a.position); });
}

bool support_outside(const RepresentingMeasure& m, const ContourSpec& c)
{
    if (!m.densities().empty()) {
        constexpr int samples = 512;
        for (int k = 0; k <= samples; ++k) {
            const double t = m.support_lo() + (m.support_hi() - m.support_lo()) * k / samples;
            if (c.encloses(t)) return false;
        }
    }
    return std::none_of(m.atoms().begin(), m.atoms().end(), [&](const Atom& a) { return c.encloses(a.position); });
}

}  // namespace

ContourOracleResult oracle_contour_detailed(const MarkovSymbol& f, const Matrix& A, const ContourSpec& contour,
                                            int max_nodes)
{
    require_square(A, "oracle_contour");
    const std::vector<cplx> spectrum = eigenvalues_of(A);
    const bool spec_in = std::all_of(spectrum.begin(), spectrum.end(), [&](cplx l) { return contour.encloses(l); });
    const bool spec_out = std::none_of(spectrum.begin(), spectrum.end(), [&](cplx l) { return contour.encloses(l); });
    const RepresentingMeasure& m = f.measure();

    ContourOracleResult out;
    if (spec_in && support_outside(m, contour)) {
        out.mode = ContourOracleResult::Mode::encloses_spectrum;
    } else if (spec_out && support_inside(m, contour)) {
        out.mode = ContourOracleResult::Mode::encloses_support;
    } else {
        throw ContourError("oracle_contour: contour " + contour.describe() +
                           " must separate the spectrum of A from the support of the symbol");
    }

    const Eigen::Index n = A.rows();
    const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
    auto integral = [&](int nodes) {
        Matrix sum = Matrix::Zero(n, n);
        for (const ContourNode& node : discretize(contour, nodes)) {
            const cplx fz = f.eval_reference(node.z);
            sum += (fz * node.dz) * resolvent(A, node.z);
        }
        sum /= two_pi_i;
        if (out.mode == ContourOracleResult::Mode::encloses_spectrum) return sum;
        Matrix v = -sum;
        v.diagonal().array() += f.value_at_infinity();
        return v;
    };

    int nodes = contour.node_count;
    Matrix prev = integral(nodes);
    out.change = std::numeric_limits<double>::infinity();
    while (nodes * 2 <= max_nodes) {
        nodes *= 2;
        Matrix next = integral(nodes);
        out.change = frobenius(next - prev) / (1.0 + frobenius(next));
        prev = std::move(next);
        if (out.change < 1e-9) {
            out.converged = true;
            break;
        }
    }
    out.value = std::move(prev);
    out.nodes = nodes;
    return out;
}

Matrix oracle_contour(const MarkovSymbol& f, const Matrix& A, const ContourSpec& contour)
{
    return oracle_contour_detailed(f, A, contour).value;
}

ContourSpec default_support_contour(const MarkovSymbol& f, const Matrix& A, int nodes)
{
    const SupportHull hull = support_hull(f.measure());
    const std::vector<cplx> spectrum = eigenvalues_of(A);
    if (hull.hi - hull.lo < 1e-12 * (1.0 + std::abs(hull.hi))) {
        double d = std::numeric_limits<double>::infinity();
        for (cplx l : spectrum) d = std::min(d, std::abs(l - hull.lo));
        if (!(d > 0.0)) throw ContourError("default contour: an eigenvalue sits on the support");
        if (!std::isfinite(d)) d = 1.0;
        return ContourSpec::circle(hull.lo, 0.5 * d, nodes);
    }
    double rho_min = std::numeric_limits<double>::infinity();
    for (cplx l : spectrum) rho_min = std::min(rho_min, elliptic_radius(l, hull.lo, hull.hi));
    if (!(rho_min > 1.0 + 1e-12)) throw ContourError("default contour: an eigenvalue sits on the support");
    if (!std::isfinite(rho_min)) rho_min = 16.0;
    const double rho = std::sqrt(rho_min);
    const double half = 0.5 * (hull.hi - hull.lo);
    return ContourSpec::ellipse(cplx(0.5 * (hull.lo + hull.hi), 0.0), 0.5 * half * (rho + 1.0 / rho),
                                0.5 * half * (rho - 1.0 / rho), nodes);
}

}  // namespace opcalc
