#include "opcalc/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace opcalc {

const char* to_string(SymbolClass c) noexcept
{
    switch (c) {
        case SymbolClass::ZR_0b: return "ZR(0,b]";
        case SymbolClass::ZR_ab: return "ZR[a,b]";
    }
    return "?";
}

MarkovSymbol::MarkovSymbol(RepresentingMeasure measure, SymbolClass class_tag, std::string name)
    : measure_(std::move(measure)), class_tag_(class_tag), name_(std::move(name))
{
}

MarkovSymbol MarkovSymbol::from_closed_form(ScalarFunction f, double a, double b, SymbolClass class_tag,
                                            std::string name)
{
    MarkovSymbol s(RepresentingMeasure(a, b, {}, {}), class_tag, std::move(name));
    s.closed_form_ = std::move(f);
    return s;
}

MarkovSymbol& MarkovSymbol::with_closed_form(ScalarFunction f, ScalarFunction derivative)
{
    closed_form_ = std::move(f);
    closed_derivative_ = std::move(derivative);
    return *this;
}

namespace {

constexpr double kEvalTolerance = 1e-13;
constexpr int kMaxScalarOrder = 4096;

// Order-doubling quadrature of a scalar integrand that is analytic except near z.
cplx adaptive_scalar(const RepresentingMeasure& m, cplx z, const std::function<cplx(double)>& g)
{
    RuleOptions opts;
    opts.singularities = {z};
    opts.order = m.order();
    cplx prev = integrate_rule(build_rule(m, opts), g);
    for (int n = 2 * m.order(); n <= kMaxScalarOrder; n *= 2) {
        opts.order = n;
        const cplx next = integrate_rule(build_rule(m, opts), g);
        if (std::abs(next - prev) <= kEvalTolerance * (1.0 + std::abs(next))) return next;
        prev = next;
    }
    return prev;
}

void require_off_support(const RepresentingMeasure& m, cplx z)
{
    const double scale = 1.0 + m.support_hi();
    if (m.distance_to_support(z) <= 1e-15 * scale)
        throw DomainError("symbol evaluated on the support of its measure at z = (" + std::to_string(z.real()) +
                          ", " + std::to_string(z.imag()) + ")");
}

}  // namespace

cplx MarkovSymbol::eval(cplx z) const
{
    if (z == cplx(0.0, 0.0)) return 0.0;
    require_off_support(measure_, z);
    if (measure_.empty()) return 0.0;
    return adaptive_scalar(measure_, z, [z](double t) { return z / (t - z); });
}

cplx MarkovSymbol::eval_derivative(cplx z) const
{
    if (measure_.empty()) return 0.0;
    if (z == cplx(0.0, 0.0) && measure_.support_lo() == 0.0) return inverse_moment(measure_);
    require_off_support(measure_, z);
    return adaptive_scalar(measure_, z, [z](double t) {
        const cplx d = t - z;
        return t / (d * d);
    });
}

cplx MarkovSymbol::eval_reference(cplx z) const
{
    if (z == cplx(0.0, 0.0)) return 0.0;
    if (closed_form_) {
        if (has_measure()) require_off_support(measure_, z);
        return closed_form_(z);
    }
    return eval(z);
}

cplx MarkovSymbol::eval_derivative_reference(cplx z) const
{
    if (z == cplx(0.0, 0.0) && has_measure() && measure_.support_lo() == 0.0) return eval_derivative(z);
    if (closed_derivative_) {
        if (has_measure()) require_off_support(measure_, z);
        return closed_derivative_(z);
    }
    return eval_derivative(z);
}

double MarkovSymbol::value_at_infinity() const { return -total_mass(measure_); }

double MarkovSymbol::derivative_at_zero() const { return inverse_moment(measure_); }

MarkovSymbol example1a(double alpha, double b)
{
    if (!(alpha > 0.0 && alpha < 1.0) || !(b > 0.0)) throw InvalidArgument("example1a: need 0 < alpha < 1, b > 0");
    const double c = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
    RepresentingMeasure m(0.0, b, {}, {DensityPart{alpha - 1.0, -alpha, c, {}}});
    MarkovSymbol s(std::move(m), SymbolClass::ZR_ab, "example1a");
    auto f = [alpha, b](cplx z) -> cplx {
        if (z == cplx(0.0, 0.0)) return 0.0;
        return z / (b - z) * std::pow(z / (z - b), alpha - 1.0);
    };
    auto df = [alpha, b, f](cplx z) -> cplx {
        return -alpha * b * f(z) / (z * (z - b));
    };
    s.with_closed_form(f, df);
    s.builtin_params = {alpha, b};
    s.builtin_id = "example1a";
    return s;
}

MarkovSymbol example1b(double alpha, double b)
{
    if (!(alpha > 0.0 && alpha < 1.0) || !(b > 0.0)) throw InvalidArgument("example1b: need 0 < alpha < 1, b > 0");
    const double c = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
    RepresentingMeasure m(0.0, b, {}, {DensityPart{alpha, -alpha, c, {}}});
    MarkovSymbol s(std::move(m), SymbolClass::ZR_0b, "example1b");
    auto f = [alpha, b](cplx z) -> cplx {
        if (z == cplx(0.0, 0.0)) return 0.0;
        return z * (1.0 - std::pow(z / (z - b), alpha));
    };
    auto df = [alpha, b](cplx z) -> cplx {
        if (z == cplx(0.0, 0.0)) return 1.0;
        const cplx wa = std::pow(z / (z - b), alpha);
        return 1.0 - wa + alpha * b * wa / (z - b);
    };
    s.with_closed_form(f, df);
    s.builtin_params = {alpha, b};
    s.builtin_id = "example1b";
    return s;
}

MarkovSymbol atom_symbol(double t, double w, double a, double b)
{
    MarkovSymbol s(RepresentingMeasure(a, b, {Atom{t, w}}, {}), a == 0.0 ? SymbolClass::ZR_0b : SymbolClass::ZR_ab,
                   "atom");
    s.with_closed_form([t, w](cplx z) { return w * z / (t - z); },
                       [t, w](cplx z) { return w * t / ((t - z) * (t - z)); });
    return s;
}

MembershipReport check_membership(const MarkovSymbol& symbol, std::size_t sample_count)
{
    return check_membership(symbol, symbol.class_tag(), sample_count);
}

MembershipReport check_membership(const MarkovSymbol& symbol, SymbolClass as_class, std::size_t sample_count)
{
    if (sample_count < 8) throw InvalidArgument("check_membership: sample_count must be >= 8");
    MembershipReport report;
    report.tested_as = as_class;
    report.sample_count = sample_count;
    const double tol = report.tolerance;
    const double a = symbol.support_lo();
    const double b = symbol.support_hi();
    const double scale = std::max(1.0, b);

    auto log_grid = [&](double lo, double hi) {
        std::vector<double> g(sample_count);
        for (std::size_t i = 0; i < sample_count; ++i)
            g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(sample_count - 1));
        return g;
    };
    auto f = [&](cplx z) { return symbol.eval_reference(z); };
    auto real_sign_check = [&](const std::string& name, const std::vector<double>& xs, double sign) {
        MembershipCheck check;
        check.name = name;
        for (double x : xs) {
            const cplx v = f(x);
            ++check.samples;
            const bool real = std::abs(v.imag()) <= tol * (1.0 + std::abs(v));
            if (!real || !(sign * v.real() > 0.0)) {
                check.passed = false;
                check.violations.emplace_back(x, 0.0);
            }
        }
        return check;
    };

    {
        std::vector<double> xs;
        for (double s : log_grid(1e-6 * scale, 1e6 * scale)) xs.push_back(-s);
        report.checks.push_back(real_sign_check("negative on (-inf, 0)", xs, -1.0));
    }
    if (as_class == SymbolClass::ZR_ab && a > 0.0) {
        // g = f/z > 0 on (0, a) means f > 0 there
        std::vector<double> xs;
        for (std::size_t i = 0; i < sample_count; ++i)
            xs.push_back(a * (static_cast<double>(i) + 0.5) / static_cast<double>(sample_count));
        report.checks.push_back(real_sign_check("positive on (0, a)", xs, 1.0));
    }
    {
        std::vector<double> xs;
        for (double s : log_grid(1e-6 * scale, 1e6 * scale)) xs.push_back(b + s);
        report.checks.push_back(real_sign_check("negative on (b, inf)", xs, -1.0));
    }
    {
        MembershipCheck check;
        check.name = "Im(f(z)/z) >= 0 on the upper half plane";
        for (double r : log_grid(1e-4 * scale, 1e4 * scale)) {
            for (std::size_t k = 0; k < sample_count; ++k) {
                const double theta = std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(sample_count);
                const cplx z = std::polar(r, theta);
                const cplx g = f(z) / z;
                ++check.samples;
                if (g.imag() < -tol * (1.0 + std::abs(g))) {
                    check.passed = false;
                    check.violations.push_back(z);
                }
            }
        }
        report.checks.push_back(std::move(check));
    }
    if (as_class == SymbolClass::ZR_0b) {
        MembershipCheck check;
        check.name = "f(z)/z continuous at 0";
        if (a > 0.0) {
            check.detail = "support bounded away from 0";
        } else {
            const auto ss = log_grid(1e-2 * scale, 1e-10 * scale);  // decreasing
            std::vector<double> g;
            for (double s : ss) {
                g.push_back((f(-s) / (-s)).real());
                ++check.samples;
            }
            const double first_step = std::abs(g[1] - g[0]);
            const double last_step = std::abs(g.back() - g[g.size() - 2]);
            const bool settling = last_step <= first_step && last_step <= 1e-2 * std::abs(g.back());
            bool finite_moment = true;
            if (symbol.has_measure()) {
                try {
                    (void)inverse_moment(symbol.measure());
                } catch (const Divergence& e) {
                    finite_moment = false;
                    check.detail = std::string("inverse moment diverges: ") + e.what();
                }
            }
            if (!settling || !finite_moment) {
                check.passed = false;
                check.violations.emplace_back(-ss.back(), 0.0);
                if (!settling)
                    check.detail += (check.detail.empty() ? "" : "; ") + std::string("f(-s)/(-s) does not settle: ") +
                                    std::to_string(g[g.size() - 2]) + " -> " + std::to_string(g.back());
            }
        }
        report.checks.push_back(std::move(check));
    }
    report.member = std::all_of(report.checks.begin(), report.checks.end(), [](const MembershipCheck& c) { return c.passed; });
    return report;
}

}  // namespace opcalc
