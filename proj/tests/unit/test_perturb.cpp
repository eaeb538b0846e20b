#include "helpers.hpp"

#include "opcalc/perturb.hpp"

#include <doctest.h>

using namespace opcalc;
using testutil::mat;

namespace {

PairCertificates certs_of(const Matrix& A, const Matrix& B, double b = 1.0)
{
    return {certify_V0b(A, b), certify_V0b(B, b)};
}

Vector basis(Eigen::Index n, Eigen::Index k)
{
    Vector e = Vector::Zero(n);
    e(k) = 1.0;
    return e;
}

double constant(const BoundReport& r, const std::string& key)
{
    return std::get<double>(r.constants.at(key));
}

}  // namespace

TEST_SUITE("perturb")
{
    TEST_CASE("report tolerance: holds iff lhs <= rhs + 1e-8 (1 + rhs)")
    {
        CHECK(make_report(BoundId::thm1, 1.0, 1.0).holds);
        CHECK(make_report(BoundId::thm1, 1.0 + 1.5e-8, 1.0).holds);
        CHECK_FALSE(make_report(BoundId::thm1, 1.0 + 3e-8, 1.0).holds);
        CHECK(make_report(BoundId::thm1, 0.0, 0.0).holds);
        CHECK(make_report(BoundId::thm3, 0.5, 2.0).slack == doctest::Approx(1.5));
        CHECK(std::string(to_string(BoundId::cor4)) == "cor4");
    }

    TEST_CASE("Lipschitz bound: B = A and the diagonal example")
    {
        const MarkovSymbol f = example1b(0.5, 1.0);
        const Matrix A = fixtures::diag({-1.0, -2.0});
        const BoundReport same = bound_thm1(f, A, A, certs_of(A, A));
        CHECK(same.lhs < 1e-15);
        CHECK(same.rhs < 1e-15);
        CHECK(same.holds);

        const Matrix B = fixtures::diag({-1.1, -2.0});
        const PairCertificates pc = certs_of(A, B);
        const BoundReport r = bound_thm1(f, A, B, pc);
        CHECK(r.lhs == doctest::Approx(std::abs(f.eval_reference(-1.0) - f.eval_reference(-1.1))).epsilon(1e-10));
        const double C = pc.A.M_A + pc.B.M_A + pc.A.M_A * pc.B.M_A;
        CHECK(r.rhs == doctest::Approx(-C * f.eval_reference(-0.1).real()).epsilon(1e-10));
        CHECK(r.holds);
        CHECK(constant(r, "M_A") == pc.A.M_A);
    }

    TEST_CASE("Lipschitz bound: random commuting pairs at distance 1e-3")
    {
        fixtures::Rng rng(41);
        const MarkovSymbol f = example1b(0.5, 1.0);
        for (int k = 0; k < 100; ++k) {
            const std::size_t n = 1 + k % 5;
            auto spec = fixtures::spectrum_avoiding(0.0, 1.0, n, 0.2, rng);
            const Matrix U = fixtures::random_unitary(n, rng);
            std::vector<cplx> moved = spec;
            moved[0] += std::polar(1e-3, fixtures::uniform(rng, 0.0, 6.283));
            const Matrix A = U * fixtures::diag(spec) * U.adjoint();
            const Matrix B = U * fixtures::diag(moved) * U.adjoint();
            const BoundReport r = bound_thm1(f, A, B, certs_of(A, B));
            CHECK(r.holds);
            CHECK(r.slack > 0.0);
        }
    }

    TEST_CASE("pointwise bound: B = A, scalar reduction, non-commuting pair")
    {
        const MarkovSymbol f = example1b(0.5, 1.0);
        const Matrix A = fixtures::diag({-1.0, -2.0, -0.5});
        const Vector x = Vector::Constant(3, cplx(0.3, -0.2));
        CHECK(bound_thm2_pointwise(f, A, A, x, certs_of(A, A)).lhs == 0.0);

        const Matrix B = fixtures::diag({-1.3, -2.0, -0.4});
        const PairCertificates pc = certs_of(A, B);
        const BoundReport r = bound_thm2_pointwise(f, A, B, basis(3, 0), pc);
        CHECK(r.holds);
        CHECK(r.lhs == doctest::Approx(std::abs(f.eval_reference(-1.0) - f.eval_reference(-1.3))).epsilon(1e-10));
        const double C = pc.A.M_A + pc.B.M_A + pc.A.M_A * pc.B.M_A;
        CHECK(r.rhs == doctest::Approx(-C * f.eval_reference(-0.3).real()).epsilon(1e-10));

        const Matrix N = mat({{-1.0, 0.5, 0.0}, {0.0, -2.0, 0.0}, {0.0, 0.0, -0.5}});
        CHECK_THROWS_AS(bound_thm2_pointwise(f, A, N, x, certs_of(A, N)), PreconditionError);
    }

    TEST_CASE("ideal bound: B = A, all ideals; rank-one trace vs operator")
    {
        fixtures::Rng rng(42);
        const MarkovSymbol f = example1b(0.4, 1.0);
        const Matrix A = testutil::random_member(4, rng, false);
        for (IdealNorm w : {IdealNorm::op(), IdealNorm::trace_class(), IdealNorm::schatten_p(2.0)})
            CHECK(bound_thm3_ideal(f, A, A, w, certs_of(A, A)).lhs < 1e-15);

        for (int k = 0; k < 20; ++k) {
            auto [P, Q] = fixtures::rank_one_pair(A, 0.05, rng);
            const PairCertificates pc = certs_of(P, Q);
            const BoundReport tr = bound_thm3_ideal(f, P, Q, IdealNorm::trace_class(), pc);
            const BoundReport op = bound_thm3_ideal(f, P, Q, IdealNorm::op(), pc);
            CHECK(tr.holds);
            CHECK(op.holds);
            // rank-one A - B: same distance in both norms, f(A) - f(B) need not be rank one
            CHECK(constant(tr, "ideal_norm_A_minus_B") == doctest::Approx(constant(op, "ideal_norm_A_minus_B")));
            CHECK(tr.lhs >= op.lhs * (1.0 - 1e-12));
            CHECK(constant(tr, "f_prime_at_zero") == doctest::Approx(1.0).epsilon(1e-10));
        }
    }

    TEST_CASE("moment inequalities")
    {
        const MarkovSymbol f = example1b(0.5, 1.0);
        const Matrix A = fixtures::diag({-1.0, -2.0});
        const OperatorCertificate c = certify_V0b(A, 1.0);
        const MomentReports m = moment_inequalities(f, A, basis(2, 0), c);
        CHECK(m.cor1.lhs == doctest::Approx(std::abs(f.eval_reference(-1.0))).epsilon(1e-10));
        CHECK(m.cor1.rhs == doctest::Approx((2 * c.M_A + 1) * std::abs(f.eval_reference(-1.0))).epsilon(1e-10));
        CHECK(m.cor1.holds);
        CHECK(m.cor2.holds);
        CHECK(m.ordered);

        const Matrix Z = Matrix::Zero(3, 3);
        const MomentReports z = moment_inequalities(f, Z, basis(3, 1), certify_V0b(Z, 1.0));
        CHECK(z.cor1.lhs < 1e-15);
        CHECK(z.cor1.rhs < 1e-15);
        CHECK(z.cor2.rhs < 1e-15);

        // x is normalized internally
        const MomentReports s = moment_inequalities(f, A, 3.0 * basis(2, 0), c);
        CHECK(s.cor1.lhs == doctest::Approx(m.cor1.lhs));
        CHECK(std::get<double>(s.cor1.constants.at("input_norm_x")) == doctest::Approx(3.0));
        CHECK_THROWS(moment_inequalities(f, A, Vector::Zero(2), c));
    }

    TEST_CASE("moment inequalities: random unit vectors")
    {
        fixtures::Rng rng(43);
        const MarkovSymbol f = example1b(0.6, 1.0);
        for (int k = 0; k < 100; ++k) {
            const std::size_t n = 1 + k % 5;
            const Matrix A = testutil::random_member(n, rng, k % 2 == 0);
            const Vector x = fixtures::random_direction(n, 1.0, rng).col(0).normalized();
            const MomentReports m = moment_inequalities(f, A, x, certify_V0b(A, 1.0));
            CHECK(m.cor1.holds);
            CHECK(m.cor2.holds);
            CHECK(m.ordered);
        }
    }

    TEST_CASE("commutator bound: commuting U, U = I, random unitary, non-unitary, singular")
    {
        fixtures::Rng rng(44);
        const MarkovSymbol f = example1b(0.5, 1.0);
        const Matrix A = testutil::random_member(4, rng, false);
        const OperatorCertificate c = certify_V0b(A, 1.0);

        const BoundReport id = commutator_bound(f, A, Matrix::Identity(4, 4), IdealNorm::op(), c);
        CHECK(id.lhs == 0.0);
        CHECK(id.rhs == 0.0);
        const Matrix P = A * A + 2.0 * A;  // polynomial in A commutes with A
        const BoundReport pc = commutator_bound(f, A, P + 5.0 * Matrix::Identity(4, 4), IdealNorm::trace_class(), c);
        CHECK(pc.lhs < 1e-10);
        CHECK(pc.holds);

        for (int k = 0; k < 20; ++k) {
            const Matrix U = fixtures::random_unitary(4, rng);
            const BoundReport r = commutator_bound(f, A, U, IdealNorm::schatten_p(2.0), c);
            CHECK(r.holds);
            CHECK(std::get<std::string>(r.constants.at("unitary")) == "yes");
            CHECK(constant(r, "M_UAU^-1") == doctest::Approx(c.M_A).epsilon(1e-8));
        }
        const Matrix G = Matrix::Identity(4, 4) + 0.3 * fixtures::random_direction(4, 1.0, rng);
        const BoundReport nu = commutator_bound(f, A, G, IdealNorm::op(), c);
        CHECK(nu.holds);
        CHECK(std::get<std::string>(nu.constants.at("unitary")) == "no");

        Matrix S = Matrix::Identity(4, 4);
        S(3, 3) = 0.0;
        CHECK_THROWS_AS(commutator_bound(f, A, S, IdealNorm::op(), c), PreconditionError);
    }

    TEST_CASE("stability: stability sweep with B_n = A + E/n")
    {
        fixtures::Rng rng(45);
        const MarkovSymbol f = example1b(0.5, 1.0);
        const Matrix A = testutil::random_member(3, rng, true);
        Matrix E = fixtures::random_direction(3, 1.0, rng);
        E *= 0.05 / op_norm(E);
        std::vector<std::pair<Matrix, Matrix>> pairs;
        for (int n = 1; n <= 10; ++n) pairs.emplace_back(A, A + E / static_cast<double>(n));
        const SweepReport r = stability_sweep(f, pairs, IdealNorm::trace_class());
        CHECK(r.ratios_bounded);
        CHECK(r.decays);
        for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i].lhs < r.entries[i - 1].lhs);

        std::vector<std::pair<Matrix, Matrix>> same(4, {A, A + E});
        const SweepReport s = stability_sweep(f, same, IdealNorm::op());
        for (const auto& e : s.entries) CHECK(e.lhs == doctest::Approx(s.entries.front().lhs));
        CHECK_THROWS_AS(stability_sweep(f, same, IdealNorm::op(), 1e-3), InvalidArgument);
    }

    TEST_CASE("continuity: symbols with f_n'(-0) -> 0 give f_n(A) -> 0")
    {
        const Matrix A = fixtures::diag({-1.0, cplx(-0.5, 0.5), 2.0});
        const OperatorCertificate c = certify_V0b(A, 1.0);
        std::vector<MarkovSymbol> fs;
        for (int n = 1; n <= 6; ++n) fs.push_back(atom_symbol(1.0, std::pow(0.1, n), 0.0, 1.0));
        for (int n = 1; n <= 3; ++n)
            fs.emplace_back(example1b(0.5, 1.0).measure().scaled(std::pow(0.2, n)), SymbolClass::ZR_0b);
        const auto out = continuity_sweep(fs, A, c);
        for (const auto& e : out) {
            CHECK(e.holds);
            CHECK(e.norm <= e.derivative_bound + 1e-12);
        }
        for (int n = 1; n < 6; ++n) CHECK(out[static_cast<std::size_t>(n)].norm < out[static_cast<std::size_t>(n - 1)].norm);
    }

    TEST_CASE("min{a, 1/t} <= (1 + a d)/(t + d) on random triples")
    {
        fixtures::Rng rng(46);
        for (int k = 0; k < 1000; ++k) {
            const double a = std::exp(fixtures::uniform(rng, -8.0, 8.0));
            const double d = std::exp(fixtures::uniform(rng, -8.0, 8.0));
            const double t = std::exp(fixtures::uniform(rng, -8.0, 8.0));
            const double scale = (1.0 + a * d) / (t + d);
            CHECK(min_inequality_slack(a, d, t) >= -1e-12 * scale);
        }
        CHECK_THROWS_AS(min_inequality_slack(0.0, 1.0, 1.0), InvalidArgument);
    }

    TEST_CASE("suites are seeded")
    {
        SuiteConfig cfg;
        cfg.trials = 12;
        cfg.seed = 5;
        const SuiteSummary a = run_suite(BoundId::thm3, cfg, IdealNorm::trace_class());
        const SuiteSummary b = run_suite(BoundId::thm3, cfg, IdealNorm::trace_class());
        CHECK(a.violations == 0);
        CHECK(a.trials == 12);
        CHECK(a.min_slack == b.min_slack);
        CHECK(a.worst_ratio == b.worst_ratio);
        cfg.seed = 6;
        CHECK(run_suite(BoundId::thm3, cfg, IdealNorm::trace_class()).min_slack != a.min_slack);
        CHECK(a.name == "thm3/trace");
    }

    TEST_CASE("bounds need V_(0,b] certificates covering the support")
    {
        const MarkovSymbol f = example1b(0.5, 2.0);
        const Matrix A = -Matrix::Identity(2, 2);
        CHECK_THROWS_AS(bound_thm1(f, A, A, certs_of(A, A, 1.0)), CertificateMismatch);
        const PairCertificates vab{certify_Vab(A, 0.0, 2.0), certify_Vab(A, 0.0, 2.0)};
        CHECK_THROWS_AS(bound_thm3_ideal(f, A, A, IdealNorm::op(), vab), CertificateMismatch);
    }
}
