#pragma once

#include <stdexcept>
#include <string>

namespace hemostab {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (exit code 2 in the CLI).
class DomainError : public Error {
public:
    using Error::Error;
};

class NoEquilibrium : public DomainError {
public:
    NoEquilibrium() : DomainError("no positive equilibrium") {}
    explicit NoEquilibrium(const std::string& what) : DomainError(what) {}
};

/// The requested decay rate is undefined because tau >= tau_c.
class Unstable : public DomainError {
public:
    using DomainError::DomainError;
};

class StepTooLarge : public DomainError {
public:
    using DomainError::DomainError;
};

class WindowTooShort : public DomainError {
public:
    using DomainError::DomainError;
};

class InvalidSweep : public DomainError {
public:
    using DomainError::DomainError;
};

/// A numerical procedure failed to produce an answer (exit code 3).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class NonPositiveState : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

class DegenerateCrossing : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

class ResonantDenominator : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// b <= a: no imaginary-axis crossing exists (exit code 4).
class NoHopf : public Error {
public:
    NoHopf() : Error("no Hopf bifurcation: requires b > a") {}
    explicit NoHopf(const std::string& what) : Error(what) {}
};

}  // namespace hemostab
