#include "opcalc/perturb.hpp"

#include "opcalc/errors.hpp"
#include "opcalc/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opcalc {

namespace {

using fixtures::Rng;
using fixtures::uniform;

std::size_t pick_dim(const SuiteConfig& c, Rng& rng)
{
    const auto span = static_cast<double>(c.max_dim - c.min_dim + 1);
    return c.min_dim + std::min(static_cast<std::size_t>(uniform(rng, 0.0, span)), c.max_dim - c.min_dim);
}

MarkovSymbol random_symbol(std::size_t trial, double b, Rng& rng)
{
    if (trial % 2 == 0) return example1b(uniform(rng, 0.2, 0.8), b);
    const int count = 1 + static_cast<int>(uniform(rng, 0.0, 4.0));
    std::vector<Atom> atoms;
    for (int k = 0; k < count; ++k) atoms.push_back({uniform(rng, 0.05 * b, b), uniform(rng, 0.1, 2.0)});
    return MarkovSymbol(RepresentingMeasure(0.0, b, atoms, {}), SymbolClass::ZR_0b, "atomic");
}

Matrix random_member(std::size_t trial, std::size_t n, double b, Rng& rng)
{
    const auto spec = fixtures::spectrum_avoiding(0.0, b, n, uniform(rng, 0.05, 0.5) * b, rng);
    if (trial % 3 == 2) return fixtures::random_normal(spec, rng);
    return fixtures::random_nonnormal(spec, uniform(rng, 0.0, 1.0), rng);
}

// B = A + E with a certified B; shrinks E until B stays in the class.
std::pair<Matrix, OperatorCertificate> certified_neighbour(const Matrix& A, double b, Rng& rng)
{
    double size = std::pow(10.0, uniform(rng, -4.0, -0.3));
    for (int attempt = 0; attempt < 60; ++attempt, size *= 0.7) {
        const Matrix B = A + fixtures::random_direction(static_cast<std::size_t>(A.rows()), size, rng);
        try {
            return {B, certify_V0b(B, b, kDefaultCertificateGrid, "B")};
        } catch (const NotInClass&) {
        }
    }
    throw Error("suite: could not draw a certified neighbour");
}

void tally(SuiteSummary& s, const BoundReport& r)
{
    ++s.trials;
    s.min_slack = std::min(s.min_slack, r.slack);
    if (r.rhs > 0.0) s.worst_ratio = std::max(s.worst_ratio, r.lhs / r.rhs);
    if (!r.holds) {
        ++s.violations;
        s.failures.push_back(r);
    }
}

}  // namespace

SuiteSummary run_suite(BoundId id, const SuiteConfig& config, IdealNorm which)
{
    if (config.min_dim < 1 || config.max_dim < config.min_dim) throw InvalidArgument("suite: bad dimension range");
    if (!(config.b > 0.0)) throw InvalidArgument("suite: b must be positive");
    SuiteSummary s;
    s.name = to_string(id);
    if (id == BoundId::thm3 || id == BoundId::cor4) s.name += "/" + which.name();
    s.min_slack = std::numeric_limits<double>::infinity();
    Rng rng(config.seed * 1000003ULL + static_cast<unsigned long long>(id));
    const double b = config.b;

    for (std::size_t trial = 0; trial < config.trials; ++trial) {
        const std::size_t n = pick_dim(config, rng);
        const MarkovSymbol f = random_symbol(trial, b, rng);
        switch (id) {
            case BoundId::thm1:
            case BoundId::thm3: {
                const Matrix A = random_member(trial, n, b, rng);
                const OperatorCertificate ca = certify_V0b(A, b, kDefaultCertificateGrid, "A");
                auto [B, cb] = certified_neighbour(A, b, rng);
                const PairCertificates pc{ca, cb};
                tally(s, id == BoundId::thm1 ? bound_thm1(f, A, B, pc) : bound_thm3_ideal(f, A, B, which, pc));
                break;
            }
            case BoundId::thm2: {
                // Diagonal pair: A - B commutes with every R(t, B) exactly.
                const double gap = uniform(rng, 0.05, 0.5) * b;
                const auto la = fixtures::spectrum_avoiding(0.0, b, n, gap, rng);
                std::vector<cplx> lb = la;
                for (cplx& l : lb) l += cplx(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3)) * gap;
                const Matrix A = fixtures::diag(la);
                const Matrix B = fixtures::diag(lb);
                const PairCertificates pc{certify_V0b(A, b, kDefaultCertificateGrid, "A"),
                                          certify_V0b(B, b, kDefaultCertificateGrid, "B")};
                Vector x = fixtures::random_direction(n, 1.0, rng).col(0);
                x *= uniform(rng, 0.1, 10.0);
                tally(s, bound_thm2_pointwise(f, A, B, x, pc));
                break;
            }
            case BoundId::cor1:
            case BoundId::cor2: {
                const Matrix A = random_member(trial, n, b, rng);
                const OperatorCertificate ca = certify_V0b(A, b, kDefaultCertificateGrid, "A");
                const Vector x = fixtures::random_direction(n, 1.0, rng).col(0);
                const MomentReports m = moment_inequalities(f, A, x, ca);
                BoundReport r = id == BoundId::cor1 ? m.cor1 : m.cor2;
                if (!m.ordered) {
                    r.holds = false;
                    r.constants["ordering"] = std::string("rhs(cor1) > rhs(cor2)");
                }
                tally(s, r);
                break;
            }
            case BoundId::cor4: {
                const Matrix A = random_member(trial, n, b, rng);
                const OperatorCertificate ca = certify_V0b(A, b, kDefaultCertificateGrid, "A");
                Matrix U;
                if (trial % 4 == 3) {
                    U = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) +
                        fixtures::random_direction(n, 0.3, rng);
                } else {
                    U = fixtures::random_unitary(n, rng);
                }
                tally(s, commutator_bound(f, A, U, which, ca));
                break;
            }
        }
    }
    if (s.trials == 0) s.min_slack = 0.0;
    return s;
}

}  // namespace opcalc
