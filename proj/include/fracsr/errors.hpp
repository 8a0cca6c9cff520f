#pragma once

#include <stdexcept>
#include <string>

namespace fracsr {

// Every library error derives from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside its admissible range (beta not in (0,1), s <= 0, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Evaluation point outside the declared range of a field or operator.
class RangeError : public Error {
public:
    using Error::Error;
};

// Dimension mismatch between a point and a domain or field.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Gamma function evaluated at a pole.
class PoleError : public Error {
public:
    using Error::Error;
};

// A solver was asked for a problem class it does not handle (e.g. spectral with alpha < 2).
class CapabilityError : public Error {
public:
    using Error::Error;
};

// Grid too small or not strictly increasing.
class GridError : public Error {
public:
    using Error::Error;
};

// Precondition violated by the caller (e.g. starting point outside the domain).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace fracsr
