#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Input state or coin vector is not normalized to within the documented
/// tolerance, or has non-finite entries.
class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter outside its mathematical domain (phi not in (0,1), negative step
/// count, empty window, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A closed-form expression hit a vanishing denominator at this phi.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested bound state does not exist (|x| >= 1, non-normalizable).
class NonNormalizableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal consistency check failed beyond its tolerance. Thrown loudly;
/// never downgraded to a warning.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation refused because its cost grows exponentially past the cap.
class CostError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qwalk
