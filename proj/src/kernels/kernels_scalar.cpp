#include "opcalc/kernels.hpp"

#include <cstddef>

namespace opcalc::kernels::scalar {

// Component arithmetic is spelled out so the rounding sequence matches the
// AVX2 mul/addsub path exactly (std::complex multiply may take a libcall).

void axpy_compensated(cplx w, std::span<const cplx> x, std::span<cplx> sum, std::span<cplx> comp)
{
    const double wr = w.real();
    const double wi = w.imag();
    const double* xs = reinterpret_cast<const double*>(x.data());
    double* s = reinterpret_cast<double*>(sum.data());
    double* c = reinterpret_cast<double*>(comp.data());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xr = xs[2 * i];
        const double xi = xs[2 * i + 1];
        const double a = wr * xr;
        const double b = wi * xi;
        const double d = wr * xi;
        const double e = wi * xr;
        const double prod[2] = {a - b, d + e};
        for (int k = 0; k < 2; ++k) {
            const std::size_t j = 2 * i + k;
            const double y = prod[k] - c[j];
            const double t = s[j] + y;
            c[j] = (t - s[j]) - y;
            s[j] = t;
        }
    }
}

cplx dotu(std::span<const cplx> a, std::span<const cplx> b)
{
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br - ai * bi;
        im += ar * bi + ai * br;
    }
    return {re, im};
}

double sum_abs2(std::span<const cplx> a)
{
    double acc = 0.0;
    for (const cplx& v : a) acc += v.real() * v.real() + v.imag() * v.imag();
    return acc;
}

}  // namespace opcalc::kernels::scalar
