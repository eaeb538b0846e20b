#include "opcalc/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace opcalc::kernels {

#ifndef OPCALC_BUILD_AVX2
namespace avx2 {
// Not compiled in; avx2_available() is false so these are never selected.
void axpy_compensated(cplx w, std::span<const cplx> x, std::span<cplx> sum, std::span<cplx> comp)
{
    scalar::axpy_compensated(w, x, sum, comp);
}
cplx dotu(std::span<const cplx> a, std::span<const cplx> b) { return scalar::dotu(a, b); }
double sum_abs2(std::span<const cplx> a) { return scalar::sum_abs2(a); }
}  // namespace avx2
#endif

namespace {

Isa detect() noexcept
{
    if (const char* env = std::getenv("MARKOV_OPCALC_SIMD"); env && std::string_view(env) == "scalar")
        return Isa::scalar;
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) noexcept
{
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool avx2_available() noexcept
{
#if defined(OPCALC_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) noexcept
{
    if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
    current().store(isa, std::memory_order_relaxed);
}

void axpy_compensated(cplx w, std::span<const cplx> x, std::span<cplx> sum, std::span<cplx> comp)
{
    if (active_isa() == Isa::avx2)
        avx2::axpy_compensated(w, x, sum, comp);
    else
        scalar::axpy_compensated(w, x, sum, comp);
}

cplx dotu(std::span<const cplx> a, std::span<const cplx> b)
{
    return active_isa() == Isa::avx2 ? avx2::dotu(a, b) : scalar::dotu(a, b);
}

double sum_abs2(std::span<const cplx> a)
{
    return active_isa() == Isa::avx2 ? avx2::sum_abs2(a) : scalar::sum_abs2(a);
}

}  // namespace opcalc::kernels
