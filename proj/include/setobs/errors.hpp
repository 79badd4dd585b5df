#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace setobs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, missing field, invalid value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value or an iterative kernel did not
/// converge. Carries the estimation step when raised inside a run.
class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::optional<long> step = std::nullopt)
      : Error(step ? what + " (step " + std::to_string(*step) + ")" : what),
        step_(step) {}

  std::optional<long> step() const noexcept { return step_; }

 private:
  std::optional<long> step_;
};

/// sigma_min requested for a matrix whose singular values are all below the
/// rank tolerance.
class UndefinedSigmaMin : public Error {
 public:
  using Error::Error;
};

/// Observer gains cannot be built (rank condition on C2*G2 violated).
class SynthesisError : public Error {
 public:
  using Error::Error;
};

/// Gains with theta >= 1 used where the configuration demands certified ones.
class UncertifiedGains : public Error {
 public:
  using Error::Error;
};

/// A supplied Lyapunov certificate is not positive definite.
class CertificateInvalid : public Error {
 public:
  using Error::Error;
};

/// Steady-state radii requested for a non-contractive recursion.
class DivergentRadius : public Error {
 public:
  using Error::Error;
};

/// Every hypothesis mode was eliminated: the true system is outside the
/// hypothesis set or the gains do not certify the thresholds.
class ModelMismatch : public Error {
 public:
  explicit ModelMismatch(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace setobs
