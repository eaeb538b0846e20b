#pragma once

// Trace formula tr(f(A) - f(B)) = (1/2 pi i) oint xi(z) f'(z) dz, where xi is an
// antiderivative of phi(z) = tr(R(z, A)(A - B)R(z, B)) near [a, b].
//
// xi is built on the nodes of a closed contour around [a, b]: a straight segment
// from the anchor to the start of the curve, then a prefix sum of 16-point
// Gauss-Legendre integrals over the arcs between consecutive nodes.

#include "opcalc/contour.hpp"
#include "opcalc/funcalc.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace opcalc {

/// tr(R(z, A)(A - B)R(z, B)).
cplx phi(const Matrix& A, const Matrix& B, cplx z);

struct ShiftFunction {
    Matrix A;
    Matrix B;
    ContourSpec contour;
    cplx anchor{0.0, 0.0};
    std::vector<ContourNode> nodes;
    std::vector<cplx> values;     // xi at the nodes
    cplx start_value{0.0, 0.0};   // xi at curve parameter 0
    double closure_defect = 0.0;  // |oint phi dz| / (1 + max |xi|)
    double max_abs = 0.0;
    std::string path_rule;
};

/// Ellipse with foci a, b and minor semi-axis half the distance from [a, b] to sigma(A) and sigma(B).
ContourSpec default_shift_contour(const Matrix& A, const Matrix& B, double a, double b, int nodes = 256);

/// a - (minor semi-axis)/2 for ellipses, a - radius/2 for stadiums; when that
/// point is outside the contour, halfway between a and its leftmost point.
cplx default_anchor(const ContourSpec& contour, double a);

/// Throws ContourError when the contour fails to enclose [a, b], encloses an
/// eigenvalue of A or B, or phi does not integrate to zero around it (within 1e-9).
ShiftFunction build_xi(const Matrix& A, const Matrix& B, const ContourSpec& contour, double a, double b,
                       std::optional<cplx> anchor = {});

/// xi at a point inside the contour, integrated along the segment from the anchor.
cplx xi_at(const ShiftFunction& xi, cplx z);

/// (1/2 pi i) sum_k xi(z_k) g(z_k) dz_k over the contour nodes.
cplx contour_average(const ShiftFunction& xi, const std::function<cplx(cplx)>& g);

/// s, Re z, Im z, Re xi, Im xi per node.
void write_xi_csv(const ShiftFunction& xi, std::ostream& out);

struct CauchyCheck {
    double t = 0.0;
    cplx direct;  // phi(t)
    cplx cauchy;  // (1/2 pi i) oint xi(z)/(z - t)^2 dz
    double defect = 0.0;  // |direct - cauchy| / (1 + |direct|)
};

struct TraceFormulaReport {
    cplx direct;   // tr(f(A) - f(B))
    cplx kernel;   // integral phi(t) t dtau(t)
    cplx contour;  // (1/2 pi i) oint xi f' dz
    double kernel_defect = 0.0;   // relative to 1 + |direct|
    double contour_defect = 0.0;
    double anchor_shift_defect = 0.0;  // contour value under a shifted anchor
    double fprime_loop = 0.0;          // |(1/2 pi i) oint f' dz| / (1 + max |f'|)
    double closure_defect = 0.0;
    double contour_change = 0.0;  // relative change at the last node doubling
    int contour_nodes = 0;
    int apply_order = 0;
    int kernel_order = 0;
    ContourSpec contour_spec;
    cplx anchor;
    double m_A = 0.0;
    double m_B = 0.0;
    std::vector<CauchyCheck> cauchy;
    std::size_t bilinear_violations = 0;  // nodes with |phi| > ||R_A|| ||R_B|| ||A - B||_1
    double tolerance = 1e-7;
    bool holds = false;
};

struct TraceFormulaOptions {
    std::optional<ContourSpec> contour;
    std::optional<cplx> anchor;
    int max_nodes = 16384;
    int cauchy_points = 5;
};

/// f in ZR[a, b] with [a, b] the support of its measure; A and B are certified on
/// [a, b] internally. holds requires all three values within 1e-7 (1 + |direct|),
/// the Cauchy identity within 1e-7, anchor invariance within 1e-9 and a vanishing oint f'.
TraceFormulaReport trace_formula_check(const MarkovSymbol& f, const Matrix& A, const Matrix& B,
                                       const TraceFormulaOptions& options = {});

}  // namespace opcalc
