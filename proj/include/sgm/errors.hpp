#pragma once

#include <stdexcept>
#include <string>

namespace sgm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data cannot be used (constant column, empty sample, bad CSV cell).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a trustworthy answer.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The Hessian of the potential has a negative eigenvalue, so θ is infeasible at that point.
class IndefiniteHessian : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A grid or lattice would exceed the configured point budget.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

}  // namespace sgm
