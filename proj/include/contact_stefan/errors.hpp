#pragma once

#include <stdexcept>
#include <string>

namespace contact_stefan {

class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveParameter : public solver_error { using solver_error::solver_error; };
class DomainError : public solver_error { using solver_error::solver_error; };
class ToleranceNotMet : public solver_error { using solver_error::solver_error; };
class DecayViolation : public solver_error { using solver_error::solver_error; };
class DegenerateDenominator : public solver_error { using solver_error::solver_error; };
class RootNotBracketed : public solver_error { using solver_error::solver_error; };

// line is 1-based; 0 when unknown.
class ParseError : public solver_error {
 public:
  explicit ParseError(const std::string& what, std::string field_name = {}, int line_number = 0)
      : solver_error(what), field(std::move(field_name)), line(line_number) {}
  std::string field;
  int line;
};

// Fixed-point failures share a base so callers can map them to one exit code.
class FixedPointFailure : public solver_error {
 public:
  FixedPointFailure(const std::string& what, double last_update)
      : solver_error(what), last_update_norm(last_update) {}
  double last_update_norm;
};
class MaxIterExceeded : public FixedPointFailure { using FixedPointFailure::FixedPointFailure; };
class DivergenceDetected : public FixedPointFailure { using FixedPointFailure::FixedPointFailure; };

class NoSignChange : public solver_error { using solver_error::solver_error; };

class InnerFailure : public solver_error {
 public:
  enum class Cause { no_sign_change, fixed_point, other };
  InnerFailure(const std::string& what, double s0_at_failure, Cause c)
      : solver_error(what), s0(s0_at_failure), cause(c) {}
  double s0;
  Cause cause;
};

}  // namespace contact_stefan
