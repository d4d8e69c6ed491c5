#pragma once

#include <stdexcept>
#include <string>

namespace cutbal {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or contradictory input (config text, matrix files, bad arguments).
class SchemaError : public Error {
public:
    using Error::Error;
};

// A stated precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Numerical failure at run time (blow-up, range violation, non-finite state).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace cutbal
