#include "helpers.hpp"

#include "opcalc/opclass.hpp"

#include <doctest.h>

#include <algorithm>

using namespace opcalc;
using testutil::mat;

namespace {

// sup over (0, b] of t / dist(t, sigma), on a fine grid plus golden refinement
double envelope_normal(const std::vector<cplx>& spec, double b)
{
    auto g = [&](double t) {
        double d = 1e300;
        for (cplx l : spec) d = std::min(d, std::abs(cplx(t) - l));
        return t / d;
    };
    double best_t = b, best = g(b);
    const int N = 20000;
    for (int i = 1; i <= N; ++i) {
        const double t = b * std::pow(1e-8, 1.0 - static_cast<double>(i) / N);
        if (g(t) > best) {
            best = g(t);
            best_t = t;
        }
    }
    double lo = std::max(best_t * 0.999, 1e-12), hi = std::min(best_t * 1.001, b);
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (g(m1) < g(m2))
            lo = m1;
        else
            hi = m2;
    }
    return std::max(best, g(0.5 * (lo + hi)));
}

double dist_to_interval(const std::vector<cplx>& spec, double a, double b)
{
    double d = 1e300;
    for (cplx l : spec) d = std::min(d, std::abs(l - cplx(std::clamp(l.real(), a, b), 0.0)));
    return d;
}

}  // namespace

TEST_SUITE("opclass")
{
    TEST_CASE("V0b examples")
    {
        CHECK(certify_V0b(Matrix::Zero(3, 3), 1.0).M_A == doctest::Approx(1.0).epsilon(2e-6));
        CHECK(certify_V0b(-Matrix::Identity(2, 2), 1.0).M_A == doctest::Approx(0.5).epsilon(2e-6));
        const Matrix T = fixtures::diag({0.5});
        const Matrix A = ritt_inverse_plus_identity(T);
        CHECK(std::abs(A(0, 0) - 3.0) < 1e-15);
        CHECK(certify_V0b(A, 1.0).M_A == doctest::Approx(0.5).epsilon(2e-6));
    }

    TEST_CASE("V0b with 0 in the spectrum flags the cutoff")
    {
        const OperatorCertificate c = certify_V0b(fixtures::diag({0.0, -1.0}), 1.0);
        CHECK(c.M_A == doctest::Approx(1.0).epsilon(2e-6));
        const OperatorCertificate j = certify_V0b(fixtures::jordan(0.0, 2), 1.0);
        CHECK(j.rising_at_cutoff);
    }

    TEST_CASE("Vab examples")
    {
        const OperatorCertificate c = certify_Vab(fixtures::diag({-1.0, 2.5}), 1.0, 2.0);
        CHECK(c.m_A == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(c.delta_A == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(c.argmax_t == doctest::Approx(2.0).epsilon(1e-6));
        const OperatorCertificate d = certify_Vab(-Matrix::Identity(2, 2), 1.0, 2.0);
        CHECK(d.m_A == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(perturbation_budget(d) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(d.m_A * d.delta_A == 1.0);
        CHECK_THROWS_AS(perturbation_budget(certify_V0b(-Matrix::Identity(2, 2), 1.0)), InvalidArgument);
    }

    TEST_CASE("eigenvalue in the interval is named")
    {
        try {
            certify_V0b(fixtures::diag({-1.0, 0.5}), 1.0);
            FAIL("expected NotInClass");
        } catch (const NotInClass& e) {
            CHECK(std::abs(e.eigenvalue() - 0.5) < 1e-12);
        }
        CHECK_THROWS_AS(certify_Vab(fixtures::diag({1.5}), 1.0, 2.0), NotInClass);
        CHECK_THROWS_AS(certify_V0b(Matrix::Zero(2, 2), -1.0), InvalidArgument);
    }

    TEST_CASE("normal matrices: M_A matches the closed-form envelope, m_A = 1/dist")
    {
        fixtures::Rng rng(17);
        for (int k = 0; k < 20; ++k) {
            const std::size_t n = 1 + k % 5;
            const auto spec = fixtures::spectrum_avoiding(0.0, 1.0, n, fixtures::uniform(rng, 0.05, 0.5), rng);
            const Matrix A = fixtures::random_normal(spec, rng);
            const double want = envelope_normal(spec, 1.0);
            const double got = certify_V0b(A, 1.0).M_A;
            CHECK(std::abs(got - want) <= 1e-5 * want);

            const OperatorCertificate v = certify_Vab(A, 0.0, 1.0);
            CHECK(v.m_A == doctest::Approx(1.0 / dist_to_interval(spec, 0.0, 1.0)).epsilon(1e-9));
        }
    }

    TEST_CASE("non-normal: m_A at least 1/dist, certificate dominates its own grid")
    {
        fixtures::Rng rng(18);
        for (int k = 0; k < 20; ++k) {
            const std::size_t n = 2 + k % 4;
            const auto spec = fixtures::spectrum_avoiding(0.0, 1.0, n, 0.2, rng);
            const Matrix A = fixtures::random_nonnormal(spec, 0.7, rng);
            const OperatorCertificate v = certify_Vab(A, 0.0, 1.0);
            CHECK(v.m_A >= (1.0 - 1e-12) / dist_to_interval(spec, 0.0, 1.0));
            CHECK(v.m_A * v.delta_A == doctest::Approx(1.0).epsilon(1e-15));
            for (double t : v.grid) CHECK(v.delta_A <= (1.0 + 1e-12) / op_norm(resolvent(A, t)));

            const OperatorCertificate c = certify_V0b(A, 1.0);
            REQUIRE_FALSE(c.grid.empty());
            for (double t : c.grid) CHECK(t * op_norm(resolvent(A, t)) <= c.M_A);
        }
    }

    TEST_CASE("unitary similarity leaves the certificate alone")
    {
        fixtures::Rng rng(19);
        for (int k = 0; k < 10; ++k) {
            const Matrix A = testutil::random_member(4, rng, k % 2 == 0);
            const Matrix U = fixtures::random_unitary(4, rng);
            const Matrix B = U * A * U.adjoint();
            CHECK(certify_V0b(B, 1.0).M_A == doctest::Approx(certify_V0b(A, 1.0).M_A).epsilon(1e-8));
            CHECK(certify_Vab(B, 0.0, 1.0).m_A == doctest::Approx(certify_Vab(A, 0.0, 1.0).m_A).epsilon(1e-8));
        }
    }

    TEST_CASE("perturbations below delta_A stay in the class")
    {
        fixtures::Rng rng(20);
        const Matrix A = fixtures::random_nonnormal({-0.5, cplx(1.5, 0.4), 2.6}, 0.5, rng);
        const double a = 1.0, b = 2.0;
        const OperatorCertificate c = certify_Vab(A, a, b);
        for (int k = 0; k < 100; ++k) {
            Matrix D = fixtures::random_direction(3, 1.0, rng);
            D *= 0.9 * c.delta_A / op_norm(D);
            CHECK_NOTHROW(certify_Vab(A + D, a, b));
        }
    }

    TEST_CASE("a rank-one push just above delta_A reaches [a, b]")
    {
        // A = diag(-1, 2.5) on [1, 2]: delta_A = 0.5, the eigenvalue 2.5 moves to 2
        const Matrix A = fixtures::diag({-1.0, 2.5});
        const OperatorCertificate c = certify_Vab(A, 1.0, 2.0);
        Matrix D = Matrix::Zero(2, 2);
        D(1, 1) = -c.delta_A * (1.0 + 1e-3);
        CHECK_THROWS_AS(certify_Vab(A + D, 1.0, 2.0), NotInClass);
    }

    TEST_CASE("Ritt fixtures: T^-1 + I is in V_(0,1]")
    {
        fixtures::Rng rng(23);
        for (int k = 0; k < 10; ++k) {
            const Matrix T = fixtures::ritt_operator(1 + k % 5, rng);
            const OperatorCertificate c = certify_V0b(ritt_inverse_plus_identity(T), 1.0);
            CHECK(c.M_A > 0.0);
            CHECK(std::isfinite(c.M_A));
        }
        CHECK_THROWS_AS(ritt_inverse_plus_identity(Matrix::Zero(2, 2)), InvalidArgument);
    }

    TEST_CASE("covers")
    {
        const OperatorCertificate c = certify_V0b(-Matrix::Identity(1, 1), 2.0);
        CHECK(c.covers(0.0, 2.0));
        CHECK(c.covers(0.5, 1.0));
        CHECK_FALSE(c.covers(0.0, 3.0));
        const OperatorCertificate v = certify_Vab(-Matrix::Identity(1, 1), 1.0, 2.0);
        CHECK(v.covers(1.0, 2.0));
        CHECK_FALSE(v.covers(0.5, 2.0));
    }
}
