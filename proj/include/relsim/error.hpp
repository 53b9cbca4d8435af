#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace relsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command-line flags or configuration values.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given labels (e.g. PR-AUC with one class).
class UndefinedMetricError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failure inside a solver or trainer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The eigensolver hit its restart cap. Carries the best residual norm
/// observed for each wanted eigenpair.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_residuals)
      : NumericalError(what), best_residuals_(std::move(best_residuals)) {}

  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

}  // namespace relsim
