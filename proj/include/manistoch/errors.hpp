#ifndef MANISTOCH_ERRORS_HPP
#define MANISTOCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace manistoch {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (mismatched manifolds, bad counts, ...).
struct UsageError : Error {
  using Error::Error;
};

// Pair on or near the cut locus; no unique minimizing geodesic.
struct DegeneratePairError : Error {
  using Error::Error;
};

struct InvalidSegmentError : Error {
  using Error::Error;
};

// Evaluation of a derivative on the singular set of a rough field.
struct SingularPointError : Error {
  using Error::Error;
};

struct InsufficientSamplesError : Error {
  using Error::Error;
};

struct IntegratorFailure : Error {
  using Error::Error;
};

struct NumericalFailure : Error {
  using Error::Error;
};

// Configuration problem; `line` is 0 when the error is not tied to a line.
struct ConfigError : Error {
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
  int line;
};

}  // namespace manistoch

#endif  // MANISTOCH_ERRORS_HPP
