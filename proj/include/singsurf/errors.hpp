#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace singsurf {

// Base of every error the library raises. The category maps one-to-one onto
// the C API status codes and the CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { usage, domain, config, numerical, io };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(Category::usage, what) {}
};

// Argument outside the mathematical domain of a function (Lambert W branch
// ranges, wave-front breakdown, critical epsilon, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Category::domain, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::io, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(Category::numerical, what) {}
};

// Adaptive quadrature that did not reach its tolerance within budget.
class QuadratureFailure : public NumericalError {
 public:
  QuadratureFailure(const std::string& what, double estimate, double error_estimate)
      : NumericalError(what), estimate_(estimate), error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

// Lanczos matrix-function iteration that hit its iteration cap.
class LanczosBreakdown : public NumericalError {
 public:
  LanczosBreakdown(const std::string& what, std::vector<double> last_iterate, int iterations,
                   double last_change)
      : NumericalError(what),
        last_iterate_(std::move(last_iterate)),
        iterations_(iterations),
        last_change_(last_change) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  int iterations() const noexcept { return iterations_; }
  double last_change() const noexcept { return last_change_; }
  // Simulation time of the failing step when raised inside a time stepper,
  // NaN otherwise.
  double time() const noexcept { return time_; }
  LanczosBreakdown at_time(double t, const std::string& context) const {
    LanczosBreakdown e(context + ": " + what(), last_iterate_, iterations_, last_change_);
    e.time_ = t;
    return e;
  }

 private:
  std::vector<double> last_iterate_;
  int iterations_;
  double last_change_;
  double time_ = std::numeric_limits<double>::quiet_NaN();
};

// A time-stepping run that produced NaN/Inf or otherwise could not continue.
class SolverFailure : public NumericalError {
 public:
  SolverFailure(const std::string& what, std::size_t step, double time)
      : NumericalError(what), step_(step), time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

}  // namespace singsurf
