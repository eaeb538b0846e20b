#pragma once

// Closed contours and their quadrature. Ellipses use the periodic trapezoidal
// rule; stadiums (a segment thickened by a radius) use composite Gauss-Legendre
// on their straight and circular pieces. Both are traversed counterclockwise
// starting from the leftmost point.

#include <complex>
#include <string>
#include <vector>

namespace opcalc {

using cplx = std::complex<double>;

struct ContourSpec {
    enum class Kind { ellipse, stadium };
    Kind kind = Kind::ellipse;
    cplx center{0.0, 0.0};
    double semi_x = 1.0;  // ellipse semi-axis along Re
    double semi_y = 1.0;  // ellipse semi-axis along Im
    double length = 0.0;  // stadium: length of the core segment
    double radius = 0.0;  // stadium: thickness
    int node_count = 256;

    static ContourSpec ellipse(cplx center, double semi_x, double semi_y, int nodes = 256);
    static ContourSpec circle(cplx center, double r, int nodes = 256) { return ellipse(center, r, r, nodes); }
    static ContourSpec stadium(cplx center, double length, double radius, int nodes = 256);
    /// Ellipse with foci lo, hi and the given minor semi-axis.
    static ContourSpec ellipse_with_foci(double lo, double hi, double minor, int nodes = 256);

    /// "ellipse:cx,cy,rx,ry[,n]", "circle:cx,cy,r[,n]", "stadium:cx,cy,len,r[,n]"
    static ContourSpec parse(const std::string& text);
    std::string describe() const;

    bool encloses(cplx z) const;
    /// Lower bound on the distance from z to the curve.
    double distance_to(cplx z) const;
    cplx leftmost() const;
};

struct ContourNode {
    cplx z;
    cplx dz;  // quadrature weight times z'(s)
    double s; // curve parameter, increasing along the traversal
};

/// Point and tangent at curve parameter s in [0, parameter_length): the angle
/// from the leftmost point for ellipses, arc length for stadiums.
struct CurvePoint {
    cplx z;
    cplx dz_ds;
};
CurvePoint curve_at(const ContourSpec& contour, double s);
double parameter_length(const ContourSpec& contour);

/// Discretization with about `nodes` points (exactly `nodes` for ellipses).
std::vector<ContourNode> discretize(const ContourSpec& contour, int nodes);

/// Elliptic radius of z with respect to the segment [lo, hi]: |u + sqrt(u^2 - 1)| >= 1.
double elliptic_radius(cplx z, double lo, double hi);

}  // namespace opcalc
