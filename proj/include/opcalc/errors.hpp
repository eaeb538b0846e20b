#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace opcalc {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad parameters, inconsistent shapes, unparsable config.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A scalar symbol was evaluated on its support.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quadrature integrand produced a non-finite value.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double node) : Error(what), node_(node) {}
    double node() const noexcept { return node_; }

private:
    double node_;
};

/// Moment integral unstable under order doubling.
class Divergence : public Error {
public:
    using Error::Error;
};

/// tI - A is numerically singular.
class SpectrumHit : public Error {
public:
    SpectrumHit(const std::string& what, std::complex<double> point, double rcond)
        : Error(what), point_(point), rcond_(rcond) {}
    std::complex<double> point() const noexcept { return point_; }
    double rcond() const noexcept { return rcond_; }

private:
    std::complex<double> point_;
    double rcond_;
};

/// The operator has an eigenvalue on the interval that must lie in its resolvent set.
class NotInClass : public Error {
public:
    NotInClass(const std::string& what, std::complex<double> eigenvalue)
        : Error(what), eigenvalue_(eigenvalue) {}
    std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

private:
    std::complex<double> eigenvalue_;
};

/// A certificate does not cover the support of the symbol it is used with.
class CertificateMismatch : public Error {
public:
    using Error::Error;
};

/// A hypothesis of a bound (commutation, invertibility) is violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// |z| outside the disc of convergence of the perturbation series.
class RadiusError : public Error {
public:
    RadiusError(const std::string& what, double radius) : Error(what), radius_(radius) {}
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

/// Contour crosses a spectrum or support, or the antiderivative is not single valued on it.
class ContourError : public Error {
public:
    using Error::Error;
};

/// The oracle refuses an input it cannot handle reliably (e.g. defective eigenbasis).
class OracleRefused : public Error {
public:
    using Error::Error;
};

}  // namespace opcalc
