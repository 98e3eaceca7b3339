#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tolldag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Network ingestion and CoDAG construction.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& message)
        : Error("parse error at '" + field + "': " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NoRoute : public Error {
public:
    using Error::Error;
};

class RouteExplosion : public Error {
public:
    RouteExplosion(std::size_t cap)
        : Error("acyclic route count exceeds cap of " + std::to_string(cap)), cap_(cap) {}

    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

// Numerical inputs.
class DimensionMismatch : public Error {
public:
    DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
        : Error(what + ": expected " + std::to_string(expected) + " entries, got " +
                std::to_string(got)) {}
};

class NegativeFlow : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class InvalidOptions : public Error {
public:
    using Error::Error;
};

// Solvers.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& solver, long iterations, double residual)
        : Error(describe(solver, iterations, residual)),
          iterations_(iterations),
          residual_(residual) {}

    long iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    static std::string describe(const std::string& solver, long iterations, double residual) {
        std::ostringstream msg;
        msg << solver << " did not converge after " << iterations << " iterations (residual "
            << residual << ")";
        return msg.str();
    }

    long iterations_;
    double residual_;
};

/// Raised when a converged optimal toll does not reproduce the social optimum.
/// This indicates a solver defect rather than a modelling condition.
class SocialGapViolation : public Error {
public:
    SocialGapViolation(double gap)
        : Error("optimal toll flow differs from social optimum by " + format(gap)),
          gap_(gap) {}

    double gap() const noexcept { return gap_; }

private:
    static std::string format(double x) {
        std::ostringstream out;
        out << x;
        return out.str();
    }

    double gap_;
};

// Dynamics.
class NonAffineLatency : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class LyapunovViolation : public Error {
public:
    using Error::Error;
};

class BoundViolation : public Error {
public:
    using Error::Error;
};

}  // namespace tolldag
