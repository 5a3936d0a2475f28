#pragma once

#include <stdexcept>
#include <string>

namespace qaoalab {

/// Base for failures of a numerical procedure (as opposed to bad input,
/// which is reported with std::invalid_argument / std::out_of_range).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Requested size is beyond the configured exhaustive/dense ceiling.
class LimitExceeded : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class PostSelectionImpossible : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class NonRealRecovery : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class RoundingFailure : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class DegeneratePair : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class AttemptsExhausted : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class IntegratorInstability : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

}  // namespace qaoalab
