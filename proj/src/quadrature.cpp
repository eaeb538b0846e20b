#include "opcalc/quadrature.hpp"

#include "opcalc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace opcalc {

namespace {

struct JacobiValue {
    double p;   // P_n^{(alpha,beta)}(x)
    double dp;  // derivative
};

JacobiValue jacobi_eval(int n, double alpha, double beta, double x)
{
    const double ab = alpha + beta;
    double p0 = 1.0;
    double p1 = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0);
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double kk = k;
        const double c = 2.0 * kk + ab;
        const double a1 = 2.0 * kk * (kk + ab) * (c - 2.0);
        const double a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        const double a3 = 2.0 * (kk + alpha - 1.0) * (kk + beta - 1.0) * c;
        const double p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    const double nn = n;
    const double c = 2.0 * nn + ab;
    const double dp = (nn * ((alpha - beta) - c * x) * p1 + 2.0 * (nn + alpha) * (nn + beta) * p0) / (c * (1.0 - x * x));
    return {p1, dp};
}

GaussRule golub_welsch(int n, double alpha, double beta)
{
    const double ab = alpha + beta;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    diag(0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        const double c = 2.0 * k + ab;
        diag(k) = (beta * beta - alpha * alpha) / (c * (c + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double c = 2.0 * k + ab;
        double b2;
        if (k == 1) {
            // (k + alpha + beta) cancels against (c - 1); stays finite when alpha + beta = -1
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (c * c * (c + 1.0) * (c - 1.0));
        }
        sub(k - 1) = std::sqrt(b2);
    }
    const double log_mu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                           std::lgamma(ab + 2.0);

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = std::exp(log_mu0);
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw Error("gauss_jacobi: tridiagonal eigensolver failed");
    const double mu0 = std::exp(log_mu0);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }

    // Polish nodes by Newton on P_n and recompute weights from the closed form,
    // which keeps relative accuracy for the tiny endpoint weights.
    const double log_c = (ab + 1.0) * std::log(2.0) + std::lgamma(n + alpha + 1.0) + std::lgamma(n + beta + 1.0) -
                         std::lgamma(n + ab + 1.0) - std::lgamma(n + 1.0);
    for (int i = 0; i < n; ++i) {
        double x = rule.nodes[i];
        for (int it = 0; it < 3; ++it) {
            const JacobiValue v = jacobi_eval(n, alpha, beta, x);
            if (v.dp == 0.0 || !std::isfinite(v.dp)) break;
            const double step = v.p / v.dp;
            if (std::abs(step) > 1e-6) break;  // trust Golub-Welsch if Newton wanders
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        const JacobiValue v = jacobi_eval(n, alpha, beta, x);
        const double w = std::exp(log_c) / ((1.0 - x * x) * v.dp * v.dp);
        if (std::isfinite(w) && w > 0.0 && std::abs(w - rule.weights[i]) <= 1e-6 * rule.weights[i] + 1e-300) {
            rule.nodes[i] = x;
            rule.weights[i] = w;
        }
    }
    return rule;
}

}  // namespace

std::shared_ptr<const GaussRule> gauss_jacobi(int n, double alpha, double beta)
{
    if (n < 1) throw InvalidArgument("gauss_jacobi: order must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0)) throw InvalidArgument("gauss_jacobi: exponents must exceed -1");

    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, std::shared_ptr<const GaussRule>> cache;
    const auto key = std::make_tuple(n, alpha, beta);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const GaussRule>(golub_welsch(n, alpha, beta));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace opcalc
