#pragma once

#include <stdexcept>
#include <string>

namespace tube {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the domain where a quantity is defined (e.g. s outside [0,L]).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The geometry degenerates: the Jacobian h is not positive somewhere.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Request for a feature the implementation does not support.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Inconsistent inputs handed to an operator assembly routine.
class AssemblyError : public Error {
public:
    using Error::Error;
};

class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Wrong number of interior zeros for a one-dimensional eigenfunction.
class SturmViolation : public Error {
public:
    using Error::Error;
};

/// Eigenvector of the full operator cannot be matched to its decoupled counterpart.
class PairingAmbiguity : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tube
