#pragma once

// Representing measures of Markov-type symbols and the quadrature rules that
// integrate against them.
//
// A measure is a finite sum of point masses plus Jacobi-type densities
//     c * (t - a)^p * (b - t)^q * h(t)   on [a, b],
// with p, q > -1 and h smooth (h = 1 unless given). Every integral against the
// measure is evaluated by a QuadratureRule: a flat list of (node, weight) pairs
// whose weights already contain the density, so that
//     integral g dtau  ~=  sum_i weight_i * g(t_i).
// Plain rules use one n-point Gauss-Jacobi rule per density. Graded rules split
// the support geometrically toward points where the integrand is nearly
// singular (a scalar argument z close to [a, b], or an eigenvalue close to it),
// keeping the endpoint exponents exact on the panels that touch a or b.

#include "opcalc/errors.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace opcalc {

using cplx = std::complex<double>;

struct Atom {
    double position;
    double weight;
};

struct DensityPart {
    double p = 0.0;  // exponent at the left end a
    double q = 0.0;  // exponent at the right end b
    double c = 1.0;  // positive coefficient
    std::function<double(double)> smooth;  // optional smooth factor h(t)

    double factor(double t) const { return smooth ? smooth(t) : 1.0; }
};

inline constexpr int kDefaultQuadratureOrder = 64;

class RepresentingMeasure {
public:
    RepresentingMeasure() = default;
    RepresentingMeasure(double a, double b, std::vector<Atom> atoms, std::vector<DensityPart> densities,
                        int order = kDefaultQuadratureOrder);

    double support_lo() const noexcept { return a_; }
    double support_hi() const noexcept { return b_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const std::vector<DensityPart>& densities() const noexcept { return densities_; }
    int order() const noexcept { return order_; }
    bool empty() const noexcept { return atoms_.empty() && densities_.empty(); }

    RepresentingMeasure with_order(int order) const;
    /// Multiplies every atom weight and density coefficient by factor > 0.
    RepresentingMeasure scaled(double factor) const;

    /// True when z lies on [a, b] (densities) or on an atom.
    bool on_support(cplx z, double tol = 0.0) const;
    /// Euclidean distance from z to the support (densities and atoms).
    double distance_to_support(cplx z) const;

private:
    double a_ = 0.0;
    double b_ = 1.0;
    std::vector<Atom> atoms_;
    std::vector<DensityPart> densities_;
    int order_ = kDefaultQuadratureOrder;
};

struct QuadratureNode {
    double t;
    double weight;
};

struct QuadratureRule {
    std::vector<QuadratureNode> nodes;
    int order = 0;
    bool graded = false;
};

struct RuleOptions {
    int order = 0;  // 0 -> measure.order()
    /// Points off the support that make the integrand nearly singular; panels are
    /// graded toward those closer than grading_threshold * (b - a).
    std::vector<cplx> singularities;
    double grading_threshold = 0.1;
    /// Multiplies the measure by (t - a)^left_shift; only meaningful when the
    /// shifted exponents stay above -1 (used for the inverse moment with a = 0).
    double left_shift = 0.0;
};

QuadratureRule build_rule(const RepresentingMeasure& measure, const RuleOptions& options = {});

/// Value-type hooks for integrate_rule. Specialized for cplx here and for
/// dense matrices in matrixcore.hpp.
template <class Value>
struct Accumulator;

template <>
struct Accumulator<cplx> {
    cplx sum{0.0, 0.0};
    cplx comp{0.0, 0.0};

    explicit Accumulator(const cplx& zero = {}) : sum(zero) {}
    static bool finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
    void add(double w, const cplx& v)
    {
        auto kahan = [](double& s, double& c, double x) {
            const double y = x - c;
            const double t = s + y;
            c = (t - s) - y;
            s = t;
        };
        double sr = sum.real(), si = sum.imag(), cr = comp.real(), ci = comp.imag();
        kahan(sr, cr, w * v.real());
        kahan(si, ci, w * v.imag());
        sum = {sr, si};
        comp = {cr, ci};
    }
    cplx result() const { return sum; }
};

/// sum_i weight_i * g(t_i) with compensated accumulation in node order,
/// starting from zero (which fixes the shape of matrix-valued results).
/// Throws EvaluationError at the first non-finite integrand value.
template <class Value, class F>
Value integrate_rule(const QuadratureRule& rule, F&& g, const Value& zero)
{
    Accumulator<Value> acc(zero);
    for (const QuadratureNode& node : rule.nodes) {
        const Value v = g(node.t);
        if (!Accumulator<Value>::finite(v))
            throw EvaluationError("non-finite integrand at quadrature node t = " + std::to_string(node.t), node.t);
        acc.add(node.weight, v);
    }
    return acc.result();
}

template <class F>
cplx integrate_rule(const QuadratureRule& rule, F&& g)
{
    return integrate_rule<cplx>(rule, [&](double t) { return cplx(g(t)); }, cplx{});
}

/// Integral of g against the measure with its own quadrature order.
cplx integrate(const RepresentingMeasure& measure, const std::function<cplx(double)>& integrand);

double total_mass(const RepresentingMeasure& measure);

/// integral dtau(t) / t. Throws Divergence when it is infinite (density with
/// p <= 0 at a = 0) or unstable under order doubling beyond 1e-8 relative.
double inverse_moment(const RepresentingMeasure& measure);

/// integral t dtau(t).
double first_moment(const RepresentingMeasure& measure);

}  // namespace opcalc
