#pragma once

#include <stdexcept>
#include <string>

namespace mfpt {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// A mode sits on the gapless point (Gamma = 1, k = pi), where the
/// Bogoliubov angle is undefined.
class SingularModeError : public Error {
 public:
  using Error::Error;
};

/// A finite-N product hit an exact zero factor 1 - g_k^2 = 0.
class SingularSampleError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double best_estimate, double error_bound)
      : Error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

class NoCriticalPointError : public Error {
 public:
  using Error::Error;
};

/// Requested chain is beyond the dimension cap of the state-vector engine.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class EvolutionError : public Error {
 public:
  EvolutionError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class InvalidQuestionError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  enum class Reason { too_few_points, nonpositive_probability };

  FitError(const std::string& what, Reason reason) : Error(what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

/// Bad sweep grid or other malformed analysis input.
class InputError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfpt
