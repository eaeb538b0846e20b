#include "helpers.hpp"

#include "opcalc/frechet.hpp"

#include <doctest.h>

#include <numbers>

using namespace opcalc;
using testutil::diff;

namespace {

// n-th Taylor coefficient of z -> F(z) at 0 from samples on |z| = r
cplx scalar_taylor(const std::function<cplx(cplx)>& F, int n, double r, int N = 128)
{
    cplx s = 0.0;
    for (int k = 0; k < N; ++k) {
        const cplx w = std::polar(r, 2.0 * std::numbers::pi * k / N);
        s += F(w) * std::pow(w, -n);
    }
    return s / static_cast<double>(N);
}

}  // namespace

TEST_SUITE("frechet")
{
    TEST_CASE("B = 0 gives 0, linearity in B")
    {
        fixtures::Rng rng(51);
        const MarkovSymbol f = example1b(0.5, 1.0);
        const Matrix A = testutil::random_member(4, rng, false);
        const OperatorCertificate c = certify_V0b(A, 1.0);
        CHECK(op_norm(frechet_derivative(f, A, Matrix::Zero(4, 4), c)) == 0.0);

        const Matrix B1 = fixtures::random_direction(4, 1.0, rng);
        const Matrix B2 = fixtures::random_direction(4, 1.0, rng);
        const cplx s(0.7, -1.3);
        const Matrix lhs = frechet_derivative(f, A, B1 + s * B2, c);
        const Matrix rhs = frechet_derivative(f, A, B1, c) + s * frechet_derivative(f, A, B2, c);
        CHECK(diff(lhs, rhs) <= 1e-12 * (1.0 + op_norm(lhs)));
    }

    TEST_CASE("norm bound m_A^2 mu_1 ||B||_I")
    {
        fixtures::Rng rng(52);
        const MarkovSymbol f = example1a(0.5, 1.0);
        for (int k = 0; k < 10; ++k) {
            const Matrix A = testutil::random_member(3, rng, k % 2 == 0);
            const Matrix B = fixtures::random_direction(3, 1.0, rng);
            const OperatorCertificate c = certify_Vab(A, 0.0, 1.0);
            const Matrix D = frechet_derivative(f, A, B, c);
            for (IdealNorm w : {IdealNorm::op(), IdealNorm::trace_class()})
                CHECK(norm(D, w) <= c.m_A * c.m_A * first_moment(f.measure()) * norm(B, w) * (1.0 + 1e-10));
        }
    }

    TEST_CASE("commuting pair: derivative is f'(A) B")
    {
        fixtures::Rng rng(53);
        const MarkovSymbol f = example1b(0.5, 1.0);
        for (int k = 0; k < 10; ++k) {
            const auto spec = fixtures::spectrum_avoiding(0.0, 1.0, 4, 0.2, rng);
            const Matrix A = fixtures::diag(spec);
            std::vector<cplx> bd;
            for (int i = 0; i < 4; ++i) bd.emplace_back(fixtures::uniform(rng, -1, 1), fixtures::uniform(rng, -1, 1));
            const Matrix B = fixtures::diag(bd);
            const OperatorCertificate c = certify_V0b(A, 1.0);
            const Matrix FB = fprime_of_A(f, A, c) * B;
            CHECK(diff(frechet_derivative(f, A, B, c), FB) <= 1e-9 * (1.0 + op_norm(FB)));
        }
    }

    TEST_CASE("f'(A): scalar examples and the eigen oracle")
    {
        const MarkovSymbol atom = atom_symbol(1.0, 1.0, 0.0, 1.0);
        const Matrix A1 = fixtures::diag({-1.0});
        CHECK(std::abs(fprime_of_A(atom, A1, certify_V0b(A1, 1.0))(0, 0) - 0.25) < 1e-14);

        const MarkovSymbol g = atom_symbol(0.5, 3.0, 0.0, 1.0);
        const Matrix Z = Matrix::Zero(2, 2);
        CHECK(diff(fprime_of_A(g, Z, certify_V0b(Z, 1.0)), 6.0 * Matrix::Identity(2, 2)) < 1e-13);

        fixtures::Rng rng(54);
        const MarkovSymbol f = example1b(0.3, 1.0);
        for (int k = 0; k < 10; ++k) {
            const Matrix A = testutil::random_member(4, rng, true);
            const EigenDecomposition e = eig(A);
            Vector d(4);
            for (int i = 0; i < 4; ++i) d(i) = f.eval_derivative_reference(e.values(i));
            const Matrix want = e.vectors * d.asDiagonal() * e.vectors.inverse();
            const Matrix got = fprime_of_A(f, A, certify_V0b(A, 1.0));
            CHECK(diff(got, want) <= 1e-8 * (1.0 + op_norm(want)));
        }
    }

    TEST_CASE("finite differences: error O(h^2)")
    {
        fixtures::Rng rng(55);
        const MarkovSymbol f = example1b(0.5, 1.0);
        for (int k = 0; k < 5; ++k) {
            const Matrix A = testutil::random_member(4, rng, false);
            const Matrix B = fixtures::random_direction(4, 1.0, rng);
            const FiniteDifferenceCheck fd =
                frechet_fd_check(f, A, B, certify_V0b(A, 1.0), {1e-3, 1e-4, 1e-5, 1e-6});
            CHECK(fd.slope >= 1.9);
        }
        CHECK(log_log_slope({1, 10, 100}, {2, 200, 20000}) == doctest::Approx(2.0));
        CHECK_THROWS_AS(log_log_slope({1}, {1}), InvalidArgument);
    }

    TEST_CASE("Taylor coefficients: C_1 is the derivative, B = 0, norm bound")
    {
        fixtures::Rng rng(56);
        const MarkovSymbol f = example1a(0.5, 1.0);
        const Matrix A = testutil::random_member(3, rng, false);
        const Matrix B = fixtures::random_direction(3, 1.0, rng);
        const OperatorCertificate c = certify_Vab(A, 0.0, 1.0);
        const auto C = taylor_coeffs(f, A, B, 6, c);
        CHECK(diff(C[0], frechet_derivative(f, A, B, c)) <= 1e-10 * (1.0 + op_norm(C[0])));
        CHECK(diff(taylor_coeff(f, A, B, 3, c), C[2]) <= 1e-10 * (1.0 + op_norm(C[2])));
        const double mu = first_moment(f.measure());
        const double nb = op_norm(B);
        for (int n = 1; n <= 6; ++n)
            CHECK(op_norm(C[static_cast<std::size_t>(n - 1)]) <=
                  std::pow(c.m_A, n + 1) * std::pow(nb, n) * mu * (1.0 + 1e-10));
        for (const Matrix& Z : taylor_coeffs(f, A, Matrix::Zero(3, 3), 4, c)) CHECK(op_norm(Z) == 0.0);
        CHECK_THROWS_AS(taylor_coeff(f, A, B, 0, c), InvalidArgument);
    }

    TEST_CASE("Taylor coefficients of a diagonal pair against scalar Cauchy sums")
    {
        const MarkovSymbol f = example1b(0.5, 1.0);
        const std::vector<cplx> a = {-1.0, cplx(0.5, 0.6), 1.8};
        const std::vector<cplx> bb = {0.7, cplx(0.2, -0.3), -0.5};
        const Matrix A = fixtures::diag(a);
        const Matrix B = fixtures::diag(bb);
        const auto C = taylor_coeffs(f, A, B, 8, certify_Vab(A, 0.0, 1.0));
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double dist = std::abs(a[i] - cplx(std::clamp(a[i].real(), 0.0, 1.0), 0.0));
            const double r = 0.5 * dist / std::abs(bb[i]);
            auto F = [&](cplx z) { return f.eval_reference(a[i] + z * bb[i]); };
            for (int n = 1; n <= 8; ++n) {
                const cplx want = scalar_taylor(F, n, r);
                const auto idx = static_cast<Eigen::Index>(i);
                CHECK(std::abs(C[static_cast<std::size_t>(n - 1)](idx, idx) - want) <= 1e-9 * (1.0 + std::abs(want)));
            }
        }
    }

    TEST_CASE("taylor_eval: z = 0, half radius, ratio, radius error")
    {
        fixtures::Rng rng(57);
        const MarkovSymbol f = example1b(0.5, 1.0);
        for (int k = 0; k < 6; ++k) {
            const Matrix A = testutil::random_member(4, rng, k % 2 == 0);
            const Matrix B = fixtures::random_direction(4, 1.0, rng);
            const OperatorCertificate c = certify_Vab(A, 0.0, 1.0);
            const TaylorResult z0 = taylor_eval(f, A, B, 0.0, 0, c);
            CHECK(op_norm(z0.value) == 0.0);

            const cplx z = std::polar(0.5 * c.delta_A / op_norm(B), 0.3 + k);
            const TaylorResult t = taylor_eval(f, A, B, z, 20, c);
            CHECK(t.ratio == doctest::Approx(0.5).epsilon(1e-12));
            const Matrix Az = A + z * B;
            const Matrix want = apply(f, Az, certify_Vab(Az, 0.0, 1.0)) - apply(f, A, c);
            CHECK(diff(t.value, want) <= 1e-8 * (1.0 + op_norm(want)));
            CHECK(t.tail_bound < 1e-5);

            const TaylorResult d = taylor_eval(f, A, B, z, 0, c);
            CHECK(d.terms <= kMaxTaylorTerms);
            CHECK(d.tail_bound < 1e-10);

            CHECK_THROWS_AS(taylor_eval(f, A, B, 1.01 * t.radius, 0, c), RadiusError);
            CHECK_THROWS_AS(taylor_eval(f, A, B, z, 0, certify_V0b(A, 1.0)), CertificateMismatch);
        }
    }

    TEST_CASE("default number of terms")
    {
        CHECK(default_taylor_terms(1.0, 1.0, 0.0) == 1);
        CHECK(default_taylor_terms(1.0, 1.0, 1.0) == kMaxTaylorTerms);
        const int N = default_taylor_terms(1.0, 1.0, 0.5);
        CHECK(std::pow(0.5, N + 1) / 0.5 < 1e-10);
        CHECK(std::pow(0.5, N) / 0.5 >= 1e-10);
    }

    TEST_CASE("continuity probe")
    {
        fixtures::Rng rng(58);
        const MarkovSymbol f = example1a(0.5, 1.0);
        const Matrix A = testutil::random_member(3, rng, false);
        const Matrix B = fixtures::random_direction(3, 1.0, rng);
        const OperatorCertificate c = certify_Vab(A, 0.0, 1.0);
        const ContinuityProbe same = frechet_continuity_probe(f, A, A, B, IdealNorm::op(), c);
        CHECK(same.value == 0.0);
        CHECK(same.holds);

        const Matrix E = fixtures::random_direction(3, 1.0, rng);
        std::vector<double> dist, val;
        for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const ContinuityProbe p =
                frechet_continuity_probe(f, A, A + h * E / op_norm(E), B, IdealNorm::trace_class(), c);
            CHECK(p.in_window);
            CHECK(p.holds);
            dist.push_back(p.distance);
            val.push_back(p.value);
        }
        CHECK(log_log_slope(dist, val) == doctest::Approx(1.0).epsilon(0.05));
    }

    TEST_CASE("resolvent perturbation bound and the differentiated resolvent")
    {
        fixtures::Rng rng(59);
        for (int k = 0; k < 200; ++k) {
            const Matrix A = testutil::random_member(1 + k % 5, rng, k % 2 == 0);
            const auto n = static_cast<std::size_t>(A.rows());
            const cplx t(fixtures::uniform(rng, 0.0, 1.0), 0.0);
            const double rn = op_norm(resolvent(A, t));
            Matrix D = fixtures::random_direction(n, 1.0, rng);
            D *= fixtures::uniform(rng, 0.01, 0.95) / (rn * op_norm(D));
            const ResolventPerturbation r = resolvent_perturbation(A, D, t);
            CHECK(r.lhs <= r.rhs * (1.0 + 1e-12) + 1e-15);
        }
        const Matrix A = fixtures::diag({-1.0});
        CHECK_THROWS_AS(resolvent_perturbation(A, fixtures::diag({3.0}), 1.0), InvalidArgument);

        const Matrix M = testutil::random_member(4, rng, false);
        const Matrix B = fixtures::random_direction(4, 1.0, rng);
        const Matrix R = resolvent(M, 0.4);
        const Matrix lim = R * B * R;
        std::vector<double> hs, es;
        for (double h : {1e-2, 1e-3, 1e-4}) {
            hs.push_back(h);
            es.push_back(diff((resolvent(M + h * B, 0.4) - R) / h, lim));
        }
        CHECK(log_log_slope(hs, es) == doctest::Approx(1.0).epsilon(0.05));
    }
}
