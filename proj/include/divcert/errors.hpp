#ifndef DIVCERT_ERRORS_HPP
#define DIVCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace divcert {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (r <= R, t_min <= 0, j == k ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed input (non-unit direction, wrong dimension, bad parameters).
class InputError : public Error {
public:
    using Error::Error;
};

// Evaluation requested in a regime the method cannot handle
// (log-only radii, phase variation above the direct-quadrature cap).
class RegimeError : public Error {
public:
    using Error::Error;
};

// Node budget exhausted before the tolerance was met.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, double achieved)
        : Error(what), achieved_error(achieved) {}
    double achieved_error;
};

// F' vanishes or changes sign on an integration-by-parts interval.
class StationaryPhaseError : public Error {
public:
    using Error::Error;
};

// Schedule construction could not satisfy a radius condition.
class ConstructionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

// A mathematically guaranteed object was not found: a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace divcert

#endif
