#include "opcalc/measure.hpp"

#include "opcalc/quadrature.hpp"

#include <algorithm>
#include <limits>

namespace opcalc {

RepresentingMeasure::RepresentingMeasure(double a, double b, std::vector<Atom> atoms,
                                         std::vector<DensityPart> densities, int order)
    : a_(a), b_(b), atoms_(std::move(atoms)), densities_(std::move(densities)), order_(order)
{
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || !(b > a))
        throw InvalidArgument("measure: support must satisfy 0 <= a < b");
    if (order < 1) throw InvalidArgument("measure: quadrature order must be >= 1");
    for (const Atom& atom : atoms_) {
        if (!(atom.weight > 0.0) || !std::isfinite(atom.weight))
            throw InvalidArgument("measure: atom weights must be positive");
        const bool left_ok = a == 0.0 ? atom.position > 0.0 : atom.position >= a;
        if (!left_ok || atom.position > b || !std::isfinite(atom.position))
            throw InvalidArgument("measure: atom at t = " + std::to_string(atom.position) + " lies outside the support");
    }
    for (const DensityPart& part : densities_) {
        if (!(part.p > -1.0) || !(part.q > -1.0))
            throw InvalidArgument("measure: density exponents must exceed -1");
        if (!(part.c > 0.0) || !std::isfinite(part.c))
            throw InvalidArgument("measure: density coefficient must be positive");
    }
}

RepresentingMeasure RepresentingMeasure::with_order(int order) const
{
    RepresentingMeasure copy = *this;
    if (order < 1) throw InvalidArgument("measure: quadrature order must be >= 1");
    copy.order_ = order;
    return copy;
}

RepresentingMeasure RepresentingMeasure::scaled(double factor) const
{
    if (!(factor > 0.0)) throw InvalidArgument("measure: scale factor must be positive");
    RepresentingMeasure copy = *this;
    for (Atom& atom : copy.atoms_) atom.weight *= factor;
    for (DensityPart& part : copy.densities_) part.c *= factor;
    return copy;
}

bool RepresentingMeasure::on_support(cplx z, double tol) const
{
    return distance_to_support(z) <= tol;
}

double RepresentingMeasure::distance_to_support(cplx z) const
{
    double d = std::numeric_limits<double>::infinity();
    if (!densities_.empty()) {
        const double x = std::clamp(z.real(), a_, b_);
        d = std::abs(z - cplx(x, 0.0));
    }
    for (const Atom& atom : atoms_) d = std::min(d, std::abs(z - atom.position));
    return d;
}

namespace {

// Interior breakpoints of a mesh graded geometrically toward focus, where the
// nearest singularity is at distance d. Panels next to the focus have length
// about d; each further panel doubles.
void graded_breakpoints(double a, double b, double focus, double d, std::vector<double>& out)
{
    const double h0 = std::max(d, 1e-14 * (b - a));
    if (focus > a) {
        out.push_back(focus);
        for (double h = h0;; h *= 2.0) {
            const double x = focus - h;
            if (x - a <= 0.5 * h) break;
            out.push_back(x);
        }
    }
    if (focus < b) {
        out.push_back(focus);
        for (double h = h0;; h *= 2.0) {
            const double x = focus + h;
            if (b - x <= 0.5 * h) break;
            out.push_back(x);
        }
    }
}

void append_plain(const DensityPart& part, double a, double b, double p, int n, std::vector<QuadratureNode>& out)
{
    const auto rule = gauss_jacobi(n, part.q, p);
    const double half = 0.5 * (b - a);
    const double scale = part.c * std::pow(half, p + part.q + 1.0);
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
        const double t = a + half * (1.0 + rule->nodes[i]);
        out.push_back({t, scale * rule->weights[i] * part.factor(t)});
    }
}

void append_panel(const DensityPart& part, double a, double b, double p, double lo, double hi, int n,
                  std::vector<QuadratureNode>& out)
{
    const double half = 0.5 * (hi - lo);
    const bool at_a = lo == a;
    const bool at_b = hi == b;
    if (at_a && at_b) {
        append_plain(part, a, b, p, n, out);
        return;
    }
    if (at_a) {
        // (t - a)^p exact; (b - t)^q smooth on this panel
        const auto rule = gauss_jacobi(n, 0.0, p);
        const double scale = part.c * std::pow(half, p + 1.0);
        for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
            const double t = lo + half * (1.0 + rule->nodes[i]);
            out.push_back({t, scale * rule->weights[i] * std::pow(b - t, part.q) * part.factor(t)});
        }
        return;
    }
    if (at_b) {
        const auto rule = gauss_jacobi(n, part.q, 0.0);
        const double scale = part.c * std::pow(half, part.q + 1.0);
        for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
            const double t = lo + half * (1.0 + rule->nodes[i]);
            out.push_back({t, scale * rule->weights[i] * std::pow(t - a, p) * part.factor(t)});
        }
        return;
    }
    const auto rule = gauss_legendre(n);
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
        const double t = lo + half * (1.0 + rule->nodes[i]);
        const double w = part.c * half * rule->weights[i] * std::pow(t - a, p) * std::pow(b - t, part.q);
        out.push_back({t, w * part.factor(t)});
    }
}

}  // namespace

QuadratureRule build_rule(const RepresentingMeasure& measure, const RuleOptions& options)
{
    const double a = measure.support_lo();
    const double b = measure.support_hi();
    const int n = options.order > 0 ? options.order : measure.order();

    QuadratureRule rule;
    rule.order = n;

    for (const Atom& atom : measure.atoms()) {
        double w = atom.weight;
        if (options.left_shift != 0.0) w *= std::pow(atom.position - a, options.left_shift);
        rule.nodes.push_back({atom.position, w});
    }

    std::vector<double> breaks;
    for (const cplx& s : options.singularities) {
        const double x = std::clamp(s.real(), a, b);
        const double d = std::abs(s - cplx(x, 0.0));
        if (d < options.grading_threshold * (b - a)) graded_breakpoints(a, b, x, d, breaks);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return x <= a || x >= b; }),
                 breaks.end());

    for (const DensityPart& part : measure.densities()) {
        const double p = part.p + options.left_shift;
        if (!(p > -1.0)) throw Divergence("measure: shifted left exponent " + std::to_string(p) + " is not integrable");
        if (breaks.empty()) {
            append_plain(part, a, b, p, n, rule.nodes);
            continue;
        }
        rule.graded = true;
        const int panel_order = std::clamp(n / 2, 16, 512);
        double lo = a;
        for (double x : breaks) {
            append_panel(part, a, b, p, lo, x, panel_order, rule.nodes);
            lo = x;
        }
        append_panel(part, a, b, p, lo, b, panel_order, rule.nodes);
    }
    return rule;
}

cplx integrate(const RepresentingMeasure& measure, const std::function<cplx(double)>& integrand)
{
    return integrate_rule(build_rule(measure), integrand);
}

double total_mass(const RepresentingMeasure& measure)
{
    return integrate_rule(build_rule(measure), [](double) { return 1.0; }).real();
}

double first_moment(const RepresentingMeasure& measure)
{
    return integrate_rule(build_rule(measure), [](double t) { return t; }).real();
}

double inverse_moment(const RepresentingMeasure& measure)
{
    const double a = measure.support_lo();
    auto at_order = [&](int n) {
        if (a == 0.0) {
            RuleOptions opts;
            opts.order = n;
            opts.left_shift = -1.0;
            return integrate_rule(build_rule(measure, opts), [](double) { return 1.0; }).real();
        }
        RuleOptions opts;
        opts.order = n;
        return integrate_rule(build_rule(measure, opts), [](double t) { return 1.0 / t; }).real();
    };
    const int n = measure.order();
    const double coarse = at_order(n);
    const double fine = at_order(2 * n);
    if (!std::isfinite(fine) || std::abs(fine - coarse) > 1e-8 * std::abs(fine))
        throw Divergence("inverse moment unstable under order doubling: " + std::to_string(coarse) + " vs " +
                         std::to_string(fine));
    return fine;
}

}  // namespace opcalc
