#pragma once

#include "opcalc/fixtures.hpp"
#include "opcalc/matrixcore.hpp"

#include <initializer_list>

namespace testutil {

using opcalc::cplx;
using opcalc::Matrix;

inline Matrix mat(std::initializer_list<std::initializer_list<cplx>> rows)
{
    Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (cplx v : r) M(i, j++) = v;
        ++i;
    }
    return M;
}

inline double diff(const Matrix& X, const Matrix& Y) { return opcalc::op_norm(X - Y); }

// diagonalizable test matrix with spectrum kept gap*b away from [0, b]
inline Matrix random_member(std::size_t n, opcalc::fixtures::Rng& rng, bool normal, double b = 1.0)
{
    namespace fx = opcalc::fixtures;
    const auto spec = fx::spectrum_avoiding(0.0, b, n, fx::uniform(rng, 0.1, 0.5) * b, rng);
    return normal ? fx::random_normal(spec, rng) : fx::random_nonnormal(spec, fx::uniform(rng, 0.1, 0.8), rng);
}

}  // namespace testutil
