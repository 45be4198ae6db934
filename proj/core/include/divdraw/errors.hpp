#pragma once

#include <stdexcept>
#include <string>

namespace divdraw {

/// Base class for all domain errors raised by the library.
/// CLI maps these to exit code 1; anything else is a bug.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- parameter validation ---

class NonPositiveParam : public Error {
public:
    using Error::Error;
};

class AlphaOutOfRange : public Error {
public:
    using Error::Error;
};

class RiskAversionInfeasible : public Error {
public:
    using Error::Error;
};

// --- root finding ---

/// No sign change located for the inner (eta) bisection; the message
/// carries the search range that was swept.
class BracketNotFound : public Error {
public:
    using Error::Error;
};

/// Outer bisection over y found no sign change; the message carries a
/// residual profile for diagnosis.
class NoRoot : public Error {
public:
    using Error::Error;
};

/// A primary/alternative constant pair disagrees beyond tolerance,
/// which indicates an upstream root-finding failure.
class ConstantMismatch : public Error {
public:
    using Error::Error;
};

/// The chain 0 < w_alpha < w_one < w_star failed.
class OrderingViolation : public Error {
public:
    using Error::Error;
};

// --- evaluation ---

class OutOfDualRange : public Error {
public:
    using Error::Error;
};

class OutOfPrimalRange : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// --- simulation ---

class NonFiniteState : public Error {
public:
    using Error::Error;
};

} // namespace divdraw
