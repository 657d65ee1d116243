#pragma once

#include <stdexcept>
#include <string>

namespace gkp {

// Bad caller input (nonpositive parameter, bad index, even cutoff, ...).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An operation was called on an input that fails its stated precondition.
struct PreconditionViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Anything that went wrong in floating point: overflow, leakage, singular blocks.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularConditioning : NumericFailure {
  std::string indices;
  SingularConditioning(const std::string& what, std::string idx)
      : NumericFailure(what), indices(std::move(idx)) {}
};

struct DegeneratePair : NumericFailure {
  using NumericFailure::NumericFailure;
};

struct TruncationLeakage : NumericFailure {
  double lost = 0.0;
  TruncationLeakage(const std::string& what, double l) : NumericFailure(what), lost(l) {}
};

struct AccuracyError : NumericFailure {
  using NumericFailure::NumericFailure;
};

}  // namespace gkp
