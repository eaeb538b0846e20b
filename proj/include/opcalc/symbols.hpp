#pragma once

// Symbols f(z) = integral z / (t - z) dtau(t) of the classes ZR(0,b] and ZR[a,b].

#include "opcalc/measure.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace opcalc {

enum class SymbolClass { ZR_0b, ZR_ab };

const char* to_string(SymbolClass c) noexcept;

using ScalarFunction = std::function<cplx(cplx)>;

class MarkovSymbol {
public:
    MarkovSymbol(RepresentingMeasure measure, SymbolClass class_tag, std::string name = "custom");

    /// A symbol known only through a closed form (no measure); useful for
    /// probing the membership checks with functions that are not symbols.
    static MarkovSymbol from_closed_form(ScalarFunction f, double a, double b, SymbolClass class_tag,
                                         std::string name = "closed-form");

    MarkovSymbol& with_closed_form(ScalarFunction f, ScalarFunction derivative = {});

    const RepresentingMeasure& measure() const noexcept { return measure_; }
    SymbolClass class_tag() const noexcept { return class_tag_; }
    const std::string& name() const noexcept { return name_; }
    bool has_closed_form() const noexcept { return static_cast<bool>(closed_form_); }
    bool has_measure() const noexcept { return !measure_.empty(); }
    double support_lo() const noexcept { return measure_.support_lo(); }
    double support_hi() const noexcept { return measure_.support_hi(); }

    /// Builtin parameters (alpha, b) for serialization; unset for custom symbols.
    std::optional<std::pair<double, double>> builtin_params;
    std::string builtin_id;

    /// integral z/(t - z) dtau(t) by quadrature (graded toward z when it is close
    /// to the support, order doubled to 1e-13). Throws DomainError on the support.
    cplx eval(cplx z) const;
    /// integral t/(t - z)^2 dtau(t); at z = 0 this is the inverse moment.
    cplx eval_derivative(cplx z) const;

    /// Closed form when available, quadrature otherwise. Oracles use these.
    cplx eval_reference(cplx z) const;
    cplx eval_derivative_reference(cplx z) const;

    /// f(infinity) = -tau(support).
    double value_at_infinity() const;
    /// f'(-0) = integral dtau / t (throws Divergence for ZR[0,b] symbols outside ZR(0,b]).
    double derivative_at_zero() const;

private:
    RepresentingMeasure measure_;
    SymbolClass class_tag_;
    std::string name_;
    ScalarFunction closed_form_;
    ScalarFunction closed_derivative_;
};

/// (z/(b - z)) (z/(z - b))^(alpha - 1): in ZR[0,b] but not in ZR(0,b].
/// Density sin(pi alpha)/pi * t^(alpha-1) (b - t)^(-alpha).
MarkovSymbol example1a(double alpha, double b);

/// z (1 - (z/(z - b))^alpha): in ZR(0,b]. Density sin(pi alpha)/pi * (t/(b - t))^alpha.
MarkovSymbol example1b(double alpha, double b);

/// Single point mass w at t: f(z) = w z / (t - z).
MarkovSymbol atom_symbol(double t, double w, double a, double b);

struct MembershipCheck {
    std::string name;
    bool passed = true;
    std::size_t samples = 0;
    std::vector<cplx> violations;  // sample points that failed
    std::string detail;
};

struct MembershipReport {
    SymbolClass tested_as;
    bool member = true;
    double tolerance = 1e-12;
    std::size_t sample_count = 0;
    std::vector<MembershipCheck> checks;
};

/// Sampling-based check of the interior characterization of ZR(0,b] / ZR[a,b]:
/// sign on the real half-lines, Im(f(z)/z) >= 0 in the upper half plane and,
/// for ZR(0,b], a finite limit of f(z)/z at 0. Violations are reported, not thrown.
MembershipReport check_membership(const MarkovSymbol& symbol, std::size_t sample_count = 16);
MembershipReport check_membership(const MarkovSymbol& symbol, SymbolClass as_class, std::size_t sample_count = 16);

}  // namespace opcalc
