#include "opcalc/measure.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace opcalc;

namespace {

const double kPi = std::numbers::pi;

RepresentingMeasure atoms(std::vector<Atom> list, double a = 0.0, double b = 4.0)
{
    return RepresentingMeasure(a, b, std::move(list), {});
}

// c t^p (b - t)^q on [0, b]
RepresentingMeasure jacobi(double p, double q, double c, double b = 1.0, int order = kDefaultQuadratureOrder)
{
    DensityPart d;
    d.p = p;
    d.q = q;
    d.c = c;
    return RepresentingMeasure(0.0, b, {}, {d}, order);
}

}  // namespace

TEST_SUITE("measure")
{
    TEST_CASE("integrate: atoms and the two Beta identities")
    {
        CHECK(integrate(atoms({{1.0, 2.0}}), [](double t) { return cplx(t); }).real() == doctest::Approx(2.0));

        const double a = 0.5;
        const double c = std::sin(kPi * a) / kPi;
        const cplx one = integrate(jacobi(a - 1.0, -a, c), [](double) { return cplx(1.0); });
        CHECK(std::abs(one - 1.0) < 1e-12);

        const cplx half = integrate(jacobi(a, -a, c), [](double) { return cplx(1.0); });
        CHECK(std::abs(half - 0.5) < 1e-12);
    }

    TEST_CASE("inverse moment")
    {
        CHECK(inverse_moment(atoms({{2.0, 3.0}})) == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(inverse_moment(atoms({{1.0, 1.0}, {0.5, 1.0}})) == doctest::Approx(3.0).epsilon(1e-15));
        for (double a : {0.1, 0.25, 0.5, 0.75, 0.9})
            for (double b : {0.5, 1.0, 2.0, 7.0}) {
                const double c = std::sin(kPi * a) / kPi;
                // (t / (b - t))^a has total mass a b and inverse moment 1 for every b
                const double im = inverse_moment(jacobi(a, -a, c, b));
                CHECK(std::abs(im - 1.0) < 1e-10);
            }
    }

    TEST_CASE("first moment")
    {
        CHECK(first_moment(atoms({{0.25, 4.0}})) == doctest::Approx(1.0));
        const double c = std::sin(kPi * 0.5) / kPi;
        CHECK(std::abs(first_moment(jacobi(0.5, -0.5, c)) - 0.375) < 1e-12);
        CHECK(first_moment(RepresentingMeasure(0.0, 1.0, {}, {})) == 0.0);
        CHECK(total_mass(RepresentingMeasure(0.0, 1.0, {}, {})) == 0.0);
    }

    TEST_CASE("mass, b times inverse moment, order doubling, linearity")
    {
        for (double a : {0.25, 0.5, 0.75}) {
            const double c = std::sin(kPi * a) / kPi;
            for (const RepresentingMeasure& m : {jacobi(a, -a, c, 2.0), jacobi(a - 1.0, -a, c, 2.0)}) {
                const double mass = total_mass(m);
                CHECK(std::abs(integrate(m, [](double) { return cplx(1.0); }) - mass) < 1e-14 * (1 + mass));
                if (m.densities().front().p > 0.0) {
                    CHECK(mass <= 2.0 * inverse_moment(m) + 1e-12);
                    const RepresentingMeasure m2 = m.with_order(2 * m.order());
                    CHECK(std::abs(inverse_moment(m2) - inverse_moment(m)) <= 1e-10 * inverse_moment(m));
                }
                const RepresentingMeasure m2 = m.with_order(2 * m.order());
                CHECK(std::abs(first_moment(m2) - first_moment(m)) <= 1e-10 * first_moment(m));

                auto g1 = [](double t) { return cplx(std::cos(3 * t), t * t); };
                auto g2 = [](double t) { return cplx(1.0 / (t + 0.3), -t); };
                const cplx lhs = integrate(m, [&](double t) { return g1(t) + g2(t); });
                const cplx rhs = integrate(m, g1) + integrate(m, g2);
                CHECK(std::abs(lhs - rhs) < 1e-14 * (1 + std::abs(lhs)));
            }
        }
    }

    TEST_CASE("an atom at t = b is fine, atoms at 0 and bad parameters are rejected")
    {
        CHECK_NOTHROW(atoms({{4.0, 1.0}}));
        CHECK_THROWS_AS(atoms({{0.0, 1.0}}), InvalidArgument);
        CHECK_THROWS_AS(atoms({{5.0, 1.0}}), InvalidArgument);
        CHECK_THROWS_AS(atoms({{1.0, 0.0}}), InvalidArgument);
        CHECK_THROWS_AS(atoms({{1.0, -2.0}}), InvalidArgument);
        CHECK_THROWS_AS(jacobi(-1.0, 0.0, 1.0), InvalidArgument);
        CHECK_THROWS_AS(jacobi(0.0, -1.5, 1.0), InvalidArgument);
        CHECK_THROWS_AS(jacobi(0.0, 0.0, 0.0), InvalidArgument);
        CHECK_THROWS_AS(RepresentingMeasure(1.0, 1.0, {}, {}), InvalidArgument);
        CHECK_THROWS_AS(RepresentingMeasure(0.0, 1.0, {}, {}, 0), InvalidArgument);
    }

    TEST_CASE("non-finite integrand names the node")
    {
        const RepresentingMeasure m = atoms({{1.0, 1.0}, {2.0, 1.0}});
        try {
            integrate(m, [](double t) { return t > 1.5 ? cplx(std::numeric_limits<double>::infinity()) : cplx(t); });
            FAIL("expected EvaluationError");
        } catch (const EvaluationError& e) {
            CHECK(e.node() == 2.0);
        }
    }

    TEST_CASE("a density with p = 0 at a = 0 has no inverse moment")
    {
        CHECK_THROWS_AS(inverse_moment(jacobi(0.0, 0.0, 1.0)), Divergence);
        CHECK_THROWS_AS(inverse_moment(jacobi(-0.5, 0.0, 1.0)), Divergence);
    }

    TEST_CASE("graded rule keeps accuracy near a close singularity")
    {
        const RepresentingMeasure m = jacobi(0.5, -0.5, 1.0 / kPi);
        RuleOptions ro;
        ro.order = 256;
        ro.singularities = {cplx(-1e-3, 0.0)};
        const QuadratureRule r = build_rule(m, ro);
        CHECK(r.graded);
        // exact: -f(-eps)/eps = 1 - sqrt(eps/(1+eps)) for f(z) = z (1 - (z/(z-1))^{1/2})
        const double eps = 1e-3;
        const cplx got = integrate_rule(r, [&](double t) { return 1.0 / (t + eps); });
        const double exact = 1.0 - std::sqrt(eps / (1.0 + eps));
        CHECK(std::abs(got.real() - exact) < 1e-10);
    }
}
