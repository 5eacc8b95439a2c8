#pragma once

#include <stdexcept>
#include <string>

namespace lsfct {

enum class ErrorCategory { config, input_data, numeric, io };

/// Base of every error thrown by the library. The category decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class InputDataError : public Error {
 public:
  explicit InputDataError(const std::string& what) : Error(ErrorCategory::input_data, what) {}
};

/// Loss of finiteness, symmetry or definiteness during a computation.
/// Carries the simulation time when one is known.
class NumericalIntegrityError : public Error {
 public:
  explicit NumericalIntegrityError(const std::string& what, double t = -1.0)
      : Error(ErrorCategory::numeric, what), t_(t) {}

  bool has_time() const noexcept { return t_ >= 0.0; }
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

/// Process exit code for an error category: config=2, numeric=3, io=4.
int exit_code(ErrorCategory category) noexcept;

}  // namespace lsfct
