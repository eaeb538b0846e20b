#include "opcalc/shift.hpp"

#include "opcalc/errors.hpp"
#include "opcalc/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace opcalc {

namespace {

// closure failure only; more nodes can fix it, a bad geometry cannot
class ClosureError : public ContourError {
public:
    using ContourError::ContourError;
};

constexpr int kArcPoints = 16;

std::vector<cplx> spectrum_of(const Matrix& M)
{
    const Eigen::ComplexEigenSolver<Matrix> es(M, false);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

struct PhiEval {
    const Matrix& A;
    const Matrix& B;
    Matrix delta;

    PhiEval(const Matrix& a, const Matrix& b) : A(a), B(b), delta(a - b) {}
    cplx operator()(cplx z) const { return trace_of_product(resolvent(A, z) * delta, resolvent(B, z)); }
};

// Gauss-Legendre on the straight segment p -> q, panels doubled until stable.
cplx segment_integral(const PhiEval& phi_at, cplx p, cplx q)
{
    if (p == q) return 0.0;
    const auto rule = gauss_legendre(kArcPoints);
    auto with_panels = [&](int panels) {
        cplx sum = 0.0;
        const cplx step = (q - p) / static_cast<double>(panels);
        for (int j = 0; j < panels; ++j) {
            const cplx left = p + step * static_cast<double>(j);
            for (int i = 0; i < kArcPoints; ++i) {
                const cplx z = left + 0.5 * step * (1.0 + rule->nodes[i]);
                sum += 0.5 * rule->weights[i] * step * phi_at(z);
            }
        }
        return sum;
    };
    cplx prev = with_panels(1);
    for (int panels = 2; panels <= 512; panels *= 2) {
        const cplx next = with_panels(panels);
        if (std::abs(next - prev) <= 1e-14 * (1.0 + std::abs(next))) return next;
        prev = next;
    }
    return prev;
}

// Gauss-Legendre along the curve between parameters s0 < s1.
cplx arc_integral(const PhiEval& phi_at, const ContourSpec& c, double s0, double s1)
{
    if (s1 <= s0) return 0.0;
    const auto rule = gauss_legendre(kArcPoints);
    cplx sum = 0.0;
    const double half = 0.5 * (s1 - s0);
    for (int i = 0; i < kArcPoints; ++i) {
        const CurvePoint cp = curve_at(c, s0 + half * (1.0 + rule->nodes[i]));
        sum += half * rule->weights[i] * phi_at(cp.z) * cp.dz_ds;
    }
    return sum;
}

void check_contour(const Matrix& A, const Matrix& B, const ContourSpec& c, double a, double b)
{
    if (!c.encloses(a) || !c.encloses(b)) {
        std::ostringstream os;
        os << "contour " << c.describe() << " does not enclose [" << a << ", " << b << "]";
        throw ContourError(os.str());
    }
    for (const Matrix* M : {&A, &B}) {
        for (cplx l : spectrum_of(*M)) {
            if (c.encloses(l)) {
                std::ostringstream os;
                os << "contour " << c.describe() << " encloses the eigenvalue " << l
                   << "; shrink it so that only [a, b] is inside";
                throw ContourError(os.str());
            }
        }
    }
}

}  // namespace

cplx phi(const Matrix& A, const Matrix& B, cplx z)
{
    require_square(A, "phi");
    if (B.rows() != A.rows() || B.cols() != A.cols()) throw InvalidArgument("phi: A and B differ in size");
    return PhiEval(A, B)(z);
}

ContourSpec default_shift_contour(const Matrix& A, const Matrix& B, double a, double b, int nodes)
{
    if (!(b > a)) throw InvalidArgument("default_shift_contour: need a < b");
    const double d = std::min(spectrum_distance(A, a, b), spectrum_distance(B, a, b));
    if (!(d > 0.0)) throw ContourError("default_shift_contour: an eigenvalue lies on [a, b]");
    return ContourSpec::ellipse_with_foci(a, b, 0.5 * d, nodes);
}

cplx default_anchor(const ContourSpec& contour, double a)
{
    const double inset = contour.kind == ContourSpec::Kind::ellipse ? contour.semi_y : contour.radius;
    const cplx z0(a - 0.5 * inset, 0.0);
    if (contour.encloses(z0)) return z0;
    // flat ellipses: a - minor/2 falls outside, use the middle of the gap instead
    return {0.5 * (a + contour.leftmost().real()), 0.0};
}

ShiftFunction build_xi(const Matrix& A, const Matrix& B, const ContourSpec& contour, double a, double b,
                       std::optional<cplx> anchor)
{
    require_square(A, "build_xi");
    if (B.rows() != A.rows() || B.cols() != A.cols()) throw InvalidArgument("build_xi: A and B differ in size");
    check_contour(A, B, contour, a, b);

    ShiftFunction xi;
    xi.A = A;
    xi.B = B;
    xi.contour = contour;
    xi.anchor = anchor ? *anchor : default_anchor(contour, a);
    if (!contour.encloses(xi.anchor)) throw ContourError("build_xi: the anchor must lie inside the contour");
    xi.nodes = discretize(contour, contour.node_count);
    std::ostringstream rule;
    rule << "segment: gauss-legendre " << kArcPoints << " (panels doubled); arcs: gauss-legendre " << kArcPoints;
    xi.path_rule = rule.str();

    const PhiEval phi_at(xi.A, xi.B);
    const double length = parameter_length(contour);
    xi.start_value = segment_integral(phi_at, xi.anchor, curve_at(contour, 0.0).z);

    cplx run = xi.start_value;
    double s_prev = 0.0;
    xi.values.reserve(xi.nodes.size());
    for (const ContourNode& node : xi.nodes) {
        run += arc_integral(phi_at, contour, s_prev, node.s);
        s_prev = node.s;
        xi.values.push_back(run);
        xi.max_abs = std::max(xi.max_abs, std::abs(run));
    }
    run += arc_integral(phi_at, contour, s_prev, length);
    xi.max_abs = std::max(xi.max_abs, std::abs(xi.start_value));
    xi.closure_defect = std::abs(run - xi.start_value) / (1.0 + xi.max_abs);
    if (!(xi.closure_defect < 1e-9)) {
        std::ostringstream os;
        os << "build_xi: phi does not integrate to zero around " << contour.describe() << " (defect "
           << xi.closure_defect << "); shrink the contour or add nodes";
        throw ClosureError(os.str());
    }
    return xi;
}

cplx xi_at(const ShiftFunction& xi, cplx z)
{
    if (!xi.contour.encloses(z)) throw ContourError("xi_at: point outside the contour");
    return segment_integral(PhiEval(xi.A, xi.B), xi.anchor, z);
}

cplx contour_average(const ShiftFunction& xi, const std::function<cplx(cplx)>& g)
{
    cplx sum = 0.0;
    for (std::size_t k = 0; k < xi.nodes.size(); ++k) sum += xi.values[k] * g(xi.nodes[k].z) * xi.nodes[k].dz;
    return sum / cplx(0.0, 2.0 * std::numbers::pi);
}

void write_xi_csv(const ShiftFunction& xi, std::ostream& out)
{
    const auto old = out.precision(17);
    out << "s,re_z,im_z,re_xi,im_xi\n";
    for (std::size_t k = 0; k < xi.nodes.size(); ++k) {
        const ContourNode& n = xi.nodes[k];
        out << n.s << ',' << n.z.real() << ',' << n.z.imag() << ',' << xi.values[k].real() << ','
            << xi.values[k].imag() << '\n';
    }
    out.precision(old);
}

namespace {

cplx kernel_integral(const MarkovSymbol& f, const Matrix& A, const Matrix& B, int& order)
{
    const PhiEval phi_at(A, B);
    std::vector<cplx> sing = spectrum_of(A);
    for (cplx l : spectrum_of(B)) sing.push_back(l);
    RuleOptions ro;
    ro.singularities = sing;
    ro.order = f.measure().order();
    auto g = [&](double t) { return phi_at(t) * t; };
    cplx prev = integrate_rule(build_rule(f.measure(), ro), g);
    order = ro.order;
    if (f.measure().densities().empty()) return prev;
    while (ro.order < 4096) {
        ro.order *= 2;
        const cplx next = integrate_rule(build_rule(f.measure(), ro), g);
        order = ro.order;
        const bool done = std::abs(next - prev) <= 1e-13 * (1.0 + std::abs(next));
        prev = next;
        if (done) break;
    }
    return prev;
}

}  // namespace

TraceFormulaReport trace_formula_check(const MarkovSymbol& f, const Matrix& A, const Matrix& B,
                                       const TraceFormulaOptions& options)
{
    require_square(A, "trace_formula_check");
    if (B.rows() != A.rows() || B.cols() != A.cols())
        throw InvalidArgument("trace_formula_check: A and B differ in size");
    const double a = f.support_lo();
    const double b = f.support_hi();

    TraceFormulaReport rep;
    const OperatorCertificate ca = certify_Vab(A, a, b, kDefaultCertificateGrid, "A");
    const OperatorCertificate cb = certify_Vab(B, a, b, kDefaultCertificateGrid, "B");
    rep.m_A = ca.m_A;
    rep.m_B = cb.m_A;

    // (i) direct
    const ApplyResult fa = apply_detailed(f, A, ca);
    const ApplyResult fb = apply_detailed(f, B, cb);
    rep.apply_order = std::max(fa.order, fb.order);
    rep.direct = trace(fa.value - fb.value);
    const double scale = 1.0 + std::abs(rep.direct);

    // (ii) kernel form
    rep.kernel = kernel_integral(f, A, B, rep.kernel_order);
    rep.kernel_defect = std::abs(rep.kernel - rep.direct) / scale;

    // (iii) contour form, nodes doubled until the value settles
    ContourSpec spec = options.contour ? *options.contour : default_shift_contour(A, B, a, b);
    const auto fprime = [&](cplx z) { return f.eval_derivative_reference(z); };
    ShiftFunction xi;
    for (;;) {
        try {
            xi = build_xi(A, B, spec, a, b, options.anchor);
            break;
        } catch (const ClosureError&) {
            if (spec.node_count * 2 > options.max_nodes) throw;
            spec.node_count *= 2;
        }
    }
    cplx value = contour_average(xi, fprime);
    rep.contour_change = std::numeric_limits<double>::infinity();
    while (spec.node_count * 2 <= options.max_nodes) {
        spec.node_count *= 2;
        ShiftFunction finer = build_xi(A, B, spec, a, b, options.anchor);
        const cplx next = contour_average(finer, fprime);
        rep.contour_change = std::abs(next - value) / (1.0 + std::abs(next));
        xi = std::move(finer);
        value = next;
        if (rep.contour_change < 1e-9) break;
    }
    rep.contour = value;
    rep.contour_defect = std::abs(rep.contour - rep.direct) / scale;
    rep.contour_spec = spec;
    rep.contour_nodes = static_cast<int>(xi.nodes.size());
    rep.anchor = xi.anchor;
    rep.closure_defect = xi.closure_defect;

    // xi is fixed only up to a constant; oint f' = 0 makes the value anchor-free
    {
        cplx loop = 0.0;
        double fmax = 0.0;
        for (const ContourNode& n : xi.nodes) {
            const cplx d = fprime(n.z);
            loop += d * n.dz;
            fmax = std::max(fmax, std::abs(d));
        }
        rep.fprime_loop = std::abs(loop / cplx(0.0, 2.0 * std::numbers::pi)) / (1.0 + fmax);
        const double inset = spec.kind == ContourSpec::Kind::ellipse ? spec.semi_y : spec.radius;
        cplx shifted = xi.anchor + cplx(0.25 * (b - a), 0.25 * inset);
        if (!spec.encloses(shifted)) shifted = 0.5 * (xi.anchor + cplx(0.5 * (a + b), 0.0));
        const ShiftFunction other = build_xi(A, B, spec, a, b, shifted);
        rep.anchor_shift_defect = std::abs(contour_average(other, fprime) - rep.contour) / scale;
    }

    // phi(t) = (1/2 pi i) oint xi(z)/(z - t)^2 dz at interior points of [a, b].
    // The kernel 1/(z - t)^2 can need more nodes than f'; finer xi are built on demand.
    std::vector<ShiftFunction> ladder;
    ladder.push_back(std::move(xi));
    auto level = [&](std::size_t k) -> const ShiftFunction& {
        while (ladder.size() <= k) {
            ContourSpec more = ladder.back().contour;
            more.node_count *= 2;
            ladder.push_back(build_xi(A, B, more, a, b, options.anchor));
        }
        return ladder[k];
    };
    for (int k = 0; k < options.cauchy_points; ++k) {
        CauchyCheck c;
        c.t = options.cauchy_points == 1 ? 0.5 * (a + b)
                                         : a + (b - a) * (0.2 + 0.6 * k / static_cast<double>(options.cauchy_points - 1));
        c.direct = phi(A, B, c.t);
        const auto kernel = [&](cplx z) { return 1.0 / ((z - c.t) * (z - c.t)); };
        c.cauchy = contour_average(level(0), kernel);
        for (std::size_t lv = 1; lv <= 4 && level(lv - 1).contour.node_count * 2 <= options.max_nodes; ++lv) {
            const cplx next = contour_average(level(lv), kernel);
            const bool settled = std::abs(next - c.cauchy) <= 1e-10 * (1.0 + std::abs(next));
            c.cauchy = next;
            if (settled) break;
        }
        c.defect = std::abs(c.direct - c.cauchy) / (1.0 + std::abs(c.direct));
        rep.cauchy.push_back(c);
    }

    // |phi(z)| <= ||R(z, A)|| ||R(z, B)|| ||A - B||_1 at the base nodes
    {
        const double dn = norm(A - B, IdealNorm::trace_class());
        const PhiEval phi_at(A, B);
        const ContourSpec base = options.contour ? *options.contour : default_shift_contour(A, B, a, b);
        for (const ContourNode& n : discretize(base, base.node_count)) {
            const double bound = op_norm(resolvent(A, n.z)) * op_norm(resolvent(B, n.z)) * dn;
            if (std::abs(phi_at(n.z)) > bound * (1.0 + 1e-10) + 1e-300) ++rep.bilinear_violations;
        }
    }

    bool ok = rep.kernel_defect <= rep.tolerance && rep.contour_defect <= rep.tolerance &&
              rep.anchor_shift_defect <= 1e-9 && rep.fprime_loop <= 1e-10 && rep.bilinear_violations == 0;
    for (const CauchyCheck& c : rep.cauchy) ok = ok && c.defect <= 1e-7;
    rep.holds = ok;
    return rep;
}

}  // namespace opcalc
