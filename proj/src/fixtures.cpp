#include "opcalc/fixtures.hpp"

#include "opcalc/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace opcalc::fixtures {

namespace {

// std::normal_distribution output is implementation-defined; Box-Muller on top
// of the engine keeps files identical across standard libraries.
double gauss(Rng& rng)
{
    const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix gaussian_matrix(std::size_t n, Rng& rng)
{
    const auto m = static_cast<Eigen::Index>(n);
    Matrix G(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) G(i, j) = cplx(gauss(rng), gauss(rng));
    return G;
}

Vector unit_vector(std::size_t n, Rng& rng)
{
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(gauss(rng), gauss(rng));
    return v / v.norm();
}

void require_dim(std::size_t n)
{
    if (n < 1 || n > 4096) throw InvalidArgument("fixture dimension must be in [1, 4096]");
}

}  // namespace

double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix diag(const std::vector<cplx>& values)
{
    if (values.empty()) throw InvalidArgument("diag fixture needs at least one value");
    Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
    return v.asDiagonal();
}

Matrix jordan(cplx lambda, std::size_t n)
{
    require_dim(n);
    const auto m = static_cast<Eigen::Index>(n);
    Matrix J = Matrix::Zero(m, m);
    J.diagonal().setConstant(lambda);
    for (Eigen::Index i = 0; i + 1 < m; ++i) J(i, i + 1) = 1.0;
    return J;
}

Matrix random_unitary(std::size_t n, Rng& rng)
{
    require_dim(n);
    const Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, rng));
    Matrix Q = qr.householderQ();
    const Matrix Rm = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
        const cplx d = Rm(j, j);
        if (std::abs(d) > 0.0) Q.col(j) *= d / std::abs(d);
    }
    return Q;
}

Matrix random_normal(const std::vector<cplx>& values, Rng& rng)
{
    const Matrix Q = random_unitary(values.size(), rng);
    return Q * diag(values) * Q.adjoint();
}

Matrix random_nonnormal(const std::vector<cplx>& values, double coupling, Rng& rng)
{
    const std::size_t n = values.size();
    const Matrix Q = random_unitary(n, rng);
    Matrix N = gaussian_matrix(n, rng).triangularView<Eigen::StrictlyUpper>();
    const double nn = n > 1 ? op_norm(N) : 0.0;
    if (nn > 0.0) N /= nn;
    return Q * (diag(values) + coupling * N) * Q.adjoint();
}

Matrix random_direction(std::size_t n, double scale, Rng& rng)
{
    require_dim(n);
    Matrix G = gaussian_matrix(n, rng);
    return G * (scale / op_norm(G));
}

std::vector<cplx> spectrum_avoiding(double lo, double hi, std::size_t n, double gap, Rng& rng)
{
    require_dim(n);
    const double w = std::max(hi - lo, 1.0);
    std::vector<cplx> out;
    out.reserve(n);
    while (out.size() < n) {
        const double pick = uniform(rng, 0.0, 1.0);
        cplx l;
        if (pick < 0.6) {
            l = cplx(uniform(rng, lo - 3.0 * w, lo - gap), uniform(rng, -w, w));
        } else if (pick < 0.8) {
            l = cplx(uniform(rng, hi + gap, hi + 3.0 * w), uniform(rng, -0.5 * w, 0.5 * w));
        } else {
            const double sgn = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
            l = cplx(uniform(rng, lo, hi), sgn * uniform(rng, gap, w));
        }
        const double x = std::clamp(l.real(), lo, hi);
        if (std::abs(l - cplx(x, 0.0)) >= gap) out.push_back(l);
    }
    return out;
}

Matrix ritt_operator(std::size_t n, Rng& rng)
{
    require_dim(n);
    // Points of a Stolz-type angle at 1: |1 - lambda| <= 2 (1 - |lambda|), away from 0.
    std::vector<cplx> d;
    while (d.size() < n) {
        const cplx l(uniform(rng, 0.2, 0.95), uniform(rng, -0.3, 0.3));
        if (std::abs(l) < 1.0 && std::abs(1.0 - l) <= 2.0 * (1.0 - std::abs(l))) d.push_back(l);
    }
    Matrix T = diag(d);
    if (n > 1) {
        double mind = 1.0;
        for (const cplx& l : d) mind = std::min(mind, 1.0 - std::abs(l));
        Matrix N = gaussian_matrix(n, rng).triangularView<Eigen::StrictlyUpper>();
        N *= 0.25 * mind / op_norm(N);
        T += N;
    }
    return T;
}

std::pair<Matrix, Matrix> rank_one_pair(const Matrix& A, double sigma, Rng& rng)
{
    require_square(A, "rank_one_pair");
    const auto n = static_cast<std::size_t>(A.rows());
    const Vector u = unit_vector(n, rng);
    const Vector v = unit_vector(n, rng);
    return {A, A + sigma * u * v.adjoint()};
}

}  // namespace opcalc::fixtures
