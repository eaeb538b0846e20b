#include "opcalc/matrixcore.hpp"

#include "opcalc/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace opcalc {

void require_square(const Matrix& A, const char* what)
{
    if (A.rows() < 1 || A.rows() != A.cols())
        throw InvalidArgument(std::string(what) + ": expected a non-empty square matrix");
    if (!A.allFinite()) throw InvalidArgument(std::string(what) + ": entries must be finite");
}

IdealNorm IdealNorm::schatten_p(double p)
{
    if (!(p >= 1.0)) throw InvalidArgument("schatten norm needs p >= 1");
    return {Kind::schatten, p};
}

IdealNorm IdealNorm::parse(const std::string& text)
{
    if (text == "op" || text == "operator") return op();
    if (text == "trace" || text == "nuclear") return trace_class();
    if (text == "hs" || text == "hilbert_schmidt") return hs();
    if (text.rfind("schatten:", 0) == 0) {
        try {
            return schatten_p(std::stod(text.substr(9)));
        } catch (const std::logic_error&) {
        }
    }
    throw InvalidArgument("unknown ideal norm '" + text + "' (expected op|trace|hs|schatten:p)");
}

std::string IdealNorm::name() const
{
    switch (kind) {
        case Kind::operator_norm: return "op";
        case Kind::trace: return "trace";
        case Kind::hilbert_schmidt: return "hs";
        case Kind::schatten: {
            std::ostringstream os;
            os << "schatten:" << p;
            return os.str();
        }
    }
    return "?";
}

ResolventSolve resolvent_with_condition(const Matrix& A, cplx t)
{
    require_square(A, "resolvent");
    const Eigen::Index n = A.rows();
    Matrix shifted = -A;
    shifted.diagonal().array() += t;
    Eigen::PartialPivLU<Matrix> lu(shifted);
    const double rcond = lu.rcond();
    if (!(rcond >= kResolventRcondFloor)) {
        std::ostringstream os;
        os << "tI - A is numerically singular at t = " << t << " (rcond ~ " << rcond << ")";
        throw SpectrumHit(os.str(), t, rcond);
    }
    return {lu.solve(Matrix::Identity(n, n)), rcond};
}

Matrix resolvent(const Matrix& A, cplx t) { return resolvent_with_condition(A, t).R; }

Eigen::VectorXd singular_values(const Matrix& S)
{
    if (S.rows() <= 16) return Eigen::JacobiSVD<Matrix>(S).singularValues();
    return Eigen::BDCSVD<Matrix>(S).singularValues();
}

double norm(const Matrix& S, IdealNorm which)
{
    if (S.size() == 0) return 0.0;
    if (which.kind == IdealNorm::Kind::hilbert_schmidt) return frobenius(S);
    const Eigen::VectorXd sv = singular_values(S);
    switch (which.kind) {
        case IdealNorm::Kind::operator_norm: return sv.maxCoeff();
        case IdealNorm::Kind::trace: return sv.sum();
        case IdealNorm::Kind::schatten: {
            const double top = sv.maxCoeff();
            if (top == 0.0) return 0.0;
            return top * std::pow((sv / top).array().pow(which.p).sum(), 1.0 / which.p);
        }
        case IdealNorm::Kind::hilbert_schmidt: break;
    }
    return frobenius(S);
}

double frobenius(const Matrix& S)
{
    return std::sqrt(kernels::sum_abs2(std::span<const cplx>(S.data(), static_cast<std::size_t>(S.size()))));
}

cplx trace(const Matrix& S) { return S.diagonal().sum(); }

cplx trace_of_product(const Matrix& X, const Matrix& Y)
{
    if (X.cols() != Y.rows() || X.rows() != Y.cols()) throw InvalidArgument("trace_of_product: shape mismatch");
    // tr(XY) = sum_ij X_ij Y_ji: an unconjugated dot of X with Y^T (both column-major)
    const Matrix Yt = Y.transpose();
    return kernels::dotu(std::span<const cplx>(X.data(), static_cast<std::size_t>(X.size())),
                         std::span<const cplx>(Yt.data(), static_cast<std::size_t>(Yt.size())));
}

EigenDecomposition eig(const Matrix& A)
{
    require_square(A, "eig");
    Eigen::ComplexEigenSolver<Matrix> solver(A, true);
    if (solver.info() != Eigen::Success) throw Error("eig: eigensolver did not converge");
    EigenDecomposition out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
        const double nj = out.vectors.col(j).norm();
        if (nj > 0.0) out.vectors.col(j) /= nj;
    }
    const Eigen::VectorXd sv = singular_values(out.vectors);
    const double smin = sv.minCoeff();
    out.condition = smin > 0.0 ? sv.maxCoeff() / smin : std::numeric_limits<double>::infinity();
    const Matrix resid = A * out.vectors - out.vectors * out.values.asDiagonal();
    out.residual = op_norm(resid) / std::max(1.0, op_norm(A));
    out.ill_conditioned = !(out.condition <= 1e6);
    out.defective = !(out.condition <= 1e12);
    return out;
}

double normality_defect(const Matrix& A)
{
    const double a = op_norm(A);
    return op_norm(A * A.adjoint() - A.adjoint() * A) / std::max(1.0, a * a);
}

}  // namespace opcalc
