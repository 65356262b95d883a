#ifndef SYMRED_ERRORS_HPP
#define SYMRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace symred {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, dimension mismatch, invalid parameter.
struct ValidationError : Error {
  using Error::Error;
};

/// A state left its admissible region mid-run: chart exit, constraint drift
/// beyond tolerance, step breakdown.
struct IntegrationError : Error {
  using Error::Error;
};

/// A matrix could not be represented in the declared algebra basis, or the
/// basis fails to close under commutators.
struct RepresentationError : Error {
  using Error::Error;
};

}  // namespace symred

#endif
