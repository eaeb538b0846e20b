#include "opcalc/kernels.hpp"

#include <immintrin.h>

#include <cstddef>

namespace opcalc::kernels::avx2 {

// Two complex<double> per 256-bit register, interleaved [re0 im0 re1 im1].

void axpy_compensated(cplx w, std::span<const cplx> x, std::span<cplx> sum, std::span<cplx> comp)
{
    const std::size_t n = x.size();
    const double* xs = reinterpret_cast<const double*>(x.data());
    double* s = reinterpret_cast<double*>(sum.data());
    double* c = reinterpret_cast<double*>(comp.data());

    const __m256d wr = _mm256_set1_pd(w.real());
    const __m256d wi = _mm256_set1_pd(w.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xs + 2 * i);
        const __m256d xsw = _mm256_permute_pd(xv, 0b0101);
        // [wr*xr - wi*xi, wr*xi + wi*xr]; mul then addsub keeps scalar rounding
        const __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(wr, xv), _mm256_mul_pd(wi, xsw));
        const __m256d sv = _mm256_loadu_pd(s + 2 * i);
        const __m256d cv = _mm256_loadu_pd(c + 2 * i);
        const __m256d y = _mm256_sub_pd(prod, cv);
        const __m256d t = _mm256_add_pd(sv, y);
        _mm256_storeu_pd(c + 2 * i, _mm256_sub_pd(_mm256_sub_pd(t, sv), y));
        _mm256_storeu_pd(s + 2 * i, t);
    }
    if (i < n) scalar::axpy_compensated(w, x.subspan(i), sum.subspan(i), comp.subspan(i));
}

cplx dotu(std::span<const cplx> a, std::span<const cplx> b)
{
    const std::size_t n = a.size();
    const double* ap = reinterpret_cast<const double*>(a.data());
    const double* bp = reinterpret_cast<const double*>(b.data());
    __m256d acc_rr = _mm256_setzero_pd();  // [ar*br, ai*bi, ...]
    __m256d acc_ri = _mm256_setzero_pd();  // [ar*bi, ai*br, ...]
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ap + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
        acc_rr = _mm256_fmadd_pd(av, bv, acc_rr);
        acc_ri = _mm256_fmadd_pd(av, _mm256_permute_pd(bv, 0b0101), acc_ri);
    }
    alignas(32) double rr[4];
    alignas(32) double ri[4];
    _mm256_store_pd(rr, acc_rr);
    _mm256_store_pd(ri, acc_ri);
    cplx tail = scalar::dotu(a.subspan(i), b.subspan(i));
    return {(rr[0] - rr[1]) + (rr[2] - rr[3]) + tail.real(), (ri[0] + ri[1]) + (ri[2] + ri[3]) + tail.imag()};
}

double sum_abs2(std::span<const cplx> a)
{
    const std::size_t n = a.size();
    const double* ap = reinterpret_cast<const double*>(a.data());
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(ap + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + scalar::sum_abs2(a.subspan(i));
}

}  // namespace opcalc::kernels::avx2
