#include "opcalc/contour.hpp"

#include "opcalc/errors.hpp"
#include "opcalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace opcalc {

namespace {

constexpr double kPi = std::numbers::pi;

struct Piece {
    std::function<cplx(double)> z;   // u in [0, 1]
    std::function<cplx(double)> dz;  // dz/du
    double length;
};

std::vector<Piece> stadium_pieces(const ContourSpec& c)
{
    const cplx x0 = c.center - c.length / 2.0;
    const cplx x1 = c.center + c.length / 2.0;
    const double r = c.radius;
    const cplx I(0.0, 1.0);
    auto arc = [r, I](cplx centre, double from, double to) {
        const double span = to - from;
        return Piece{[=](double u) { return centre + r * std::exp(I * (from + span * u)); },
                     [=](double u) { return I * r * span * std::exp(I * (from + span * u)); }, std::abs(span) * r};
    };
    auto line = [](cplx p, cplx q) {
        return Piece{[=](double u) { return p + (q - p) * u; }, [=](double) { return q - p; }, std::abs(q - p)};
    };
    std::vector<Piece> pieces;
    pieces.push_back(arc(x0, kPi, 1.5 * kPi));
    if (c.length > 0.0) pieces.push_back(line(x0 - I * r, x1 - I * r));
    pieces.push_back(arc(x1, -0.5 * kPi, 0.5 * kPi));
    if (c.length > 0.0) pieces.push_back(line(x1 + I * r, x0 + I * r));
    pieces.push_back(arc(x0, 0.5 * kPi, kPi));
    return pieces;
}

}  // namespace

ContourSpec ContourSpec::ellipse(cplx center, double semi_x, double semi_y, int nodes)
{
    if (!(semi_x > 0.0) || !(semi_y > 0.0)) throw InvalidArgument("ellipse: semi-axes must be positive");
    if (nodes < 8) throw InvalidArgument("contour: need at least 8 nodes");
    ContourSpec c;
    c.kind = Kind::ellipse;
    c.center = center;
    c.semi_x = semi_x;
    c.semi_y = semi_y;
    c.node_count = nodes;
    return c;
}

ContourSpec ContourSpec::stadium(cplx center, double length, double radius, int nodes)
{
    if (!(length >= 0.0) || !(radius > 0.0)) throw InvalidArgument("stadium: need length >= 0, radius > 0");
    if (nodes < 8) throw InvalidArgument("contour: need at least 8 nodes");
    ContourSpec c;
    c.kind = Kind::stadium;
    c.center = center;
    c.length = length;
    c.radius = radius;
    c.node_count = nodes;
    return c;
}

ContourSpec ContourSpec::ellipse_with_foci(double lo, double hi, double minor, int nodes)
{
    const double half = 0.5 * (hi - lo);
    return ellipse(cplx(0.5 * (lo + hi), 0.0), std::sqrt(half * half + minor * minor), minor, nodes);
}

ContourSpec ContourSpec::parse(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("contour: expected kind:params, got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    std::vector<double> v;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw InvalidArgument("contour: bad number '" + item + "'");
        }
    }
    auto nodes = [&](std::size_t idx) { return v.size() > idx ? static_cast<int>(v[idx]) : 256; };
    if (kind == "ellipse" && (v.size() == 4 || v.size() == 5)) return ellipse({v[0], v[1]}, v[2], v[3], nodes(4));
    if (kind == "circle" && (v.size() == 3 || v.size() == 4)) return circle({v[0], v[1]}, v[2], nodes(3));
    if (kind == "stadium" && (v.size() == 4 || v.size() == 5)) return stadium({v[0], v[1]}, v[2], v[3], nodes(4));
    throw InvalidArgument("contour: cannot parse '" + text + "'");
}

std::string ContourSpec::describe() const
{
    std::ostringstream os;
    os.precision(17);
    if (kind == Kind::ellipse)
        os << "ellipse:" << center.real() << "," << center.imag() << "," << semi_x << "," << semi_y << "," << node_count;
    else
        os << "stadium:" << center.real() << "," << center.imag() << "," << length << "," << radius << "," << node_count;
    return os.str();
}

bool ContourSpec::encloses(cplx z) const
{
    if (kind == Kind::ellipse) {
        const double x = (z.real() - center.real()) / semi_x;
        const double y = (z.imag() - center.imag()) / semi_y;
        return x * x + y * y < 1.0;
    }
    const double x = std::clamp(z.real(), center.real() - length / 2.0, center.real() + length / 2.0);
    return std::abs(z - cplx(x, center.imag())) < radius;
}

double ContourSpec::distance_to(cplx z) const
{
    if (kind == Kind::stadium) {
        const double x = std::clamp(z.real(), center.real() - length / 2.0, center.real() + length / 2.0);
        return std::abs(std::abs(z - cplx(x, center.imag())) - radius);
    }
    double d = std::numeric_limits<double>::infinity();
    constexpr int samples = 4096;
    for (int k = 0; k < samples; ++k) {
        const double th = 2.0 * kPi * k / samples;
        d = std::min(d, std::abs(z - (center + cplx(semi_x * std::cos(th), semi_y * std::sin(th)))));
    }
    const double chord = 2.0 * kPi * std::max(semi_x, semi_y) / samples;
    return std::max(0.0, d - chord);
}

cplx ContourSpec::leftmost() const
{
    if (kind == Kind::ellipse) return center - semi_x;
    return center - (length / 2.0 + radius);
}

double parameter_length(const ContourSpec& contour)
{
    if (contour.kind == ContourSpec::Kind::ellipse) return 2.0 * kPi;
    double total = 0.0;
    for (const Piece& p : stadium_pieces(contour)) total += p.length;
    return total;
}

CurvePoint curve_at(const ContourSpec& contour, double s)
{
    if (contour.kind == ContourSpec::Kind::ellipse) {
        const double th = kPi + s;
        return {contour.center + cplx(contour.semi_x * std::cos(th), contour.semi_y * std::sin(th)),
                cplx(-contour.semi_x * std::sin(th), contour.semi_y * std::cos(th))};
    }
    const auto pieces = stadium_pieces(contour);
    double s0 = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Piece& p = pieces[i];
        if (s <= s0 + p.length || i + 1 == pieces.size()) {
            const double u = std::clamp((s - s0) / p.length, 0.0, 1.0);
            return {p.z(u), p.dz(u) / p.length};
        }
        s0 += p.length;
    }
    return {contour.leftmost(), cplx(0.0, -1.0)};
}

std::vector<ContourNode> discretize(const ContourSpec& contour, int nodes)
{
    if (nodes < 8) throw InvalidArgument("contour: need at least 8 nodes");
    std::vector<ContourNode> out;
    if (contour.kind == ContourSpec::Kind::ellipse) {
        out.reserve(static_cast<std::size_t>(nodes));
        const double h = 2.0 * kPi / nodes;
        for (int k = 0; k < nodes; ++k) {
            const double th = kPi + h * k;
            const cplx z = contour.center + cplx(contour.semi_x * std::cos(th), contour.semi_y * std::sin(th));
            const cplx dz = cplx(-contour.semi_x * std::sin(th), contour.semi_y * std::cos(th)) * h;
            out.push_back({z, dz, h * k});
        }
        return out;
    }
    constexpr int per_panel = 8;
    const auto rule = gauss_legendre(per_panel);
    const auto pieces = stadium_pieces(contour);
    double total = 0.0;
    for (const Piece& p : pieces) total += p.length;
    double s0 = 0.0;
    for (const Piece& p : pieces) {
        const int panels = std::max(1, static_cast<int>(std::lround(nodes / static_cast<double>(per_panel) * p.length / total)));
        for (int j = 0; j < panels; ++j) {
            const double u0 = static_cast<double>(j) / panels;
            const double du = 1.0 / panels;
            for (int i = 0; i < per_panel; ++i) {
                const double u = u0 + 0.5 * du * (1.0 + rule->nodes[i]);
                const double w = 0.5 * du * rule->weights[i];
                out.push_back({p.z(u), p.dz(u) * w, s0 + u * p.length});
            }
        }
        s0 += p.length;
    }
    return out;
}

double elliptic_radius(cplx z, double lo, double hi)
{
    const double half = 0.5 * (hi - lo);
    if (half <= 0.0) return std::numeric_limits<double>::infinity();
    const cplx u = (z - 0.5 * (lo + hi)) / half;
    const cplx root = std::sqrt(u * u - 1.0);
    return std::max(std::abs(u + root), std::abs(u - root));
}

}  // namespace opcalc
