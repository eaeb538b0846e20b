#include "opcalc/kernels.hpp"
#include "opcalc/matrixcore.hpp"

#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

using namespace opcalc;
namespace k = opcalc::kernels;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

// restores the dispatch choice on scope exit
struct IsaGuard {
    k::Isa saved = k::active_isa();
    ~IsaGuard() { k::set_isa(saved); }
};

}  // namespace

TEST_SUITE("kernels")
{
    TEST_CASE("scalar axpy accumulates with compensation")
    {
        std::vector<cplx> x = {{1.0, 2.0}, {-3.0, 0.5}};
        std::vector<cplx> sum(2), comp(2);
        k::scalar::axpy_compensated({2.0, 0.0}, x, sum, comp);
        k::scalar::axpy_compensated({0.5, 0.0}, x, sum, comp);
        CHECK(sum[0] == cplx(2.5, 5.0));
        CHECK(sum[1] == cplx(-7.5, 1.25));

        // 1 + many tiny terms: the compensated sum keeps them
        std::vector<cplx> s(1, cplx(1.0, 0.0)), c(1);
        std::vector<cplx> tiny(1, cplx(1e-17, 0.0));
        for (int i = 0; i < 1000; ++i) k::scalar::axpy_compensated({1.0, 0.0}, tiny, s, c);
        CHECK((s[0] - c[0]).real() == doctest::Approx(1.0 + 1e-14).epsilon(1e-16));
    }

    TEST_CASE("dotu is unconjugated and sum_abs2 is the squared norm")
    {
        std::vector<cplx> a = {{0.0, 1.0}, {2.0, 0.0}};
        std::vector<cplx> b = {{0.0, 1.0}, {1.0, 1.0}};
        CHECK(k::scalar::dotu(a, b) == cplx(1.0, 2.0));
        CHECK(k::scalar::sum_abs2(a) == 5.0);
        CHECK(k::dotu(a, b) == cplx(1.0, 2.0));
        CHECK(k::sum_abs2(a) == 5.0);
    }

    TEST_CASE("avx2 axpy matches scalar bit for bit")
    {
        if (!k::avx2_available()) {
            MESSAGE("avx2 not available, equivalence vacuous");
            return;
        }
        std::mt19937_64 rng(11);
        for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 33u, 100u, 257u}) {
            const auto x = random_vec(n, rng);
            auto s1 = random_vec(n, rng);
            auto c1 = std::vector<cplx>(n);
            auto s2 = s1;
            auto c2 = c1;
            for (int rep = 0; rep < 5; ++rep) {
                const cplx w(0.37 * rep - 0.9, 0.0);
                k::scalar::axpy_compensated(w, x, s1, c1);
                k::avx2::axpy_compensated(w, x, s2, c2);
            }
            CHECK(std::memcmp(s1.data(), s2.data(), n * sizeof(cplx)) == 0);
            CHECK(std::memcmp(c1.data(), c2.data(), n * sizeof(cplx)) == 0);
        }
    }

    TEST_CASE("avx2 dot and norm agree with scalar to rounding")
    {
        if (!k::avx2_available()) {
            MESSAGE("avx2 not available, equivalence vacuous");
            return;
        }
        std::mt19937_64 rng(12);
        for (std::size_t n : {0u, 1u, 2u, 5u, 8u, 31u, 64u, 1000u}) {
            const auto a = random_vec(n, rng);
            const auto b = random_vec(n, rng);
            double scale = 1.0;
            for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i]) * std::abs(b[i]);
            CHECK(std::abs(k::scalar::dotu(a, b) - k::avx2::dotu(a, b)) <= 1e-14 * scale);
            const double s = k::scalar::sum_abs2(a);
            CHECK(std::abs(s - k::avx2::sum_abs2(a)) <= 1e-14 * (1.0 + s));
        }
    }

    TEST_CASE("dispatch can be pinned and higher level results do not move")
    {
        IsaGuard guard;
        std::mt19937_64 rng(5);
        Matrix X = Matrix::Random(6, 6);
        Matrix Y = Matrix::Random(6, 6);

        k::set_isa(k::Isa::scalar);
        CHECK(k::active_isa() == k::Isa::scalar);
        const cplx t1 = trace_of_product(X, Y);
        const double f1 = frobenius(X);

        k::set_isa(k::Isa::avx2);
        CHECK(k::active_isa() == (k::avx2_available() ? k::Isa::avx2 : k::Isa::scalar));
        const cplx t2 = trace_of_product(X, Y);
        const double f2 = frobenius(X);

        CHECK(std::abs(t1 - (X * Y).trace()) <= 1e-12);
        CHECK(std::abs(t1 - t2) <= 1e-13);
        CHECK(f1 == doctest::Approx(f2).epsilon(1e-14));
        CHECK(std::string(k::isa_name(k::Isa::scalar)) == "scalar");
    }
}
