#pragma once

// Reproducible test matrices. Every generator draws from a caller-owned
// std::mt19937_64, so a seed fixes the output bit for bit.

#include "opcalc/matrixcore.hpp"

#include <random>
#include <utility>
#include <vector>

namespace opcalc::fixtures {

using Rng = std::mt19937_64;

Matrix diag(const std::vector<cplx>& values);

/// n x n Jordan block with eigenvalue lambda.
Matrix jordan(cplx lambda, std::size_t n);

/// Haar-distributed unitary (QR of a complex Gaussian matrix, phases fixed).
Matrix random_unitary(std::size_t n, Rng& rng);

/// Q diag(values) Q^* with Q Haar unitary.
Matrix random_normal(const std::vector<cplx>& values, Rng& rng);

/// Q (diag(values) + coupling * N) Q^* with N strictly upper triangular, ||N|| = 1.
Matrix random_nonnormal(const std::vector<cplx>& values, double coupling, Rng& rng);

/// Complex Gaussian matrix scaled to operator norm `scale`.
Matrix random_direction(std::size_t n, double scale, Rng& rng);

/// n eigenvalues at distance >= gap from the real interval [lo, hi]: mostly in
/// the left half plane, some right of hi, some off the real axis above [lo, hi].
std::vector<cplx> spectrum_avoiding(double lo, double hi, std::size_t n, double gap, Rng& rng);

/// Ritt operator T = D + N: D diagonal with entries in the Stolz angle
/// |1 - lambda| <= 2 (1 - |lambda|), N a small nilpotent part. T^{-1} + I is in V_(0,1].
Matrix ritt_operator(std::size_t n, Rng& rng);

/// (A, A + sigma u v^*) with unit random u, v.
std::pair<Matrix, Matrix> rank_one_pair(const Matrix& A, double sigma, Rng& rng);

/// Uniform double in [lo, hi).
double uniform(Rng& rng, double lo, double hi);

}  // namespace opcalc::fixtures
