#pragma once

#include <memory>
#include <vector>

namespace opcalc {

/// Gauss rule on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta.
struct GaussRule {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;  // include the weight function
};

/// n-point Gauss-Jacobi rule (Golub-Welsch, Newton-polished). Requires n >= 1,
/// alpha > -1, beta > -1. Results are memoized; the returned rule is shared.
std::shared_ptr<const GaussRule> gauss_jacobi(int n, double alpha, double beta);

inline std::shared_ptr<const GaussRule> gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

}  // namespace opcalc
