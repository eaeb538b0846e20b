#pragma once

// Inner loops shared by every quadrature: compensated accumulation of weighted
// matrices, unconjugated dot products (traces of products) and squared norms.
// Each kernel has a portable scalar reference and, on x86-64, an AVX2 variant
// chosen at runtime. Set MARKOV_OPCALC_SIMD=scalar to pin the reference path.

#include <complex>
#include <span>

namespace opcalc::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;

/// True when the AVX2 variant was compiled in and the CPU reports avx2 support.
bool avx2_available() noexcept;

/// Variant used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Overrides the dispatch choice (tests). Requests for an unavailable ISA fall back to scalar.
void set_isa(Isa isa) noexcept;

/// sum += w * x with per-component Kahan compensation carried in comp.
void axpy_compensated(cplx w, std::span<const cplx> x, std::span<cplx> sum, std::span<cplx> comp);

/// sum_i a_i * b_i (no conjugation).
cplx dotu(std::span<const cplx> a, std::span<const cplx> b);

/// sum_i |a_i|^2
double sum_abs2(std::span<const cplx> a);

namespace scalar {
void axpy_compensated(cplx w, std::span<const cplx> x, std::span<cplx> sum, std::span<cplx> comp);
cplx dotu(std::span<const cplx> a, std::span<const cplx> b);
double sum_abs2(std::span<const cplx> a);
}  // namespace scalar

namespace avx2 {
void axpy_compensated(cplx w, std::span<const cplx> x, std::span<cplx> sum, std::span<cplx> comp);
cplx dotu(std::span<const cplx> a, std::span<const cplx> b);
double sum_abs2(std::span<const cplx> a);
}  // namespace avx2

}  // namespace opcalc::kernels
