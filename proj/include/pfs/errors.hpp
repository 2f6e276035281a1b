#ifndef PFS_ERRORS_HPP
#define PFS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pfs {

/// A resonant or near-resonant denominator was hit (rational sigma,
/// small divisor below the refusal threshold, ...). Carries the witness.
class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(std::string what, double divisor, int m, double n_sq)
      : std::runtime_error(std::move(what)), divisor(divisor), m(m), n_sq(n_sq) {}
  double divisor;
  int m;
  double n_sq;
};

/// An iterative solver exhausted its budget. `trace` holds the per-iteration
/// distances (or merit values) observed before giving up.
class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(std::string what, std::vector<double> trace = {})
      : std::runtime_error(std::move(what)), trace(std::move(trace)) {}
  std::vector<double> trace;
};

class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loop samples too widely spaced to lift continuously.
class AmbiguousLift : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateOrbit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pfs

#endif
