#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace lsfct {

using StateVector = std::vector<double>;

/// Time-varying vector field dx/dt = rhs(t, x). rhs must be deterministic.
struct OdeSystem {
  std::size_t dimension = 0;
  std::function<void(double t, std::span<const double> x, std::span<double> dxdt)> rhs;
};

enum class Method { rk4, euler };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct IntegrationConfig {
  double step = 1e-4;
  double t_end = 10.0;
  Method method = Method::rk4;

  /// Throws ConfigError unless 0 < step < t_end.
  void validate() const;

  /// Number of steps; a horizon that is not a multiple of the step is padded up.
  std::size_t step_count() const;
  double padded_t_end() const { return static_cast<double>(step_count()) * step; }
  bool padded() const;
};

StateVector step_rk4(const OdeSystem& system, double t, std::span<const double> x, double h);
StateVector step_euler(const OdeSystem& system, double t, std::span<const double> x, double h);

/// Called before step `index` (from t to t + h) is taken.
using StepBegin = std::function<void(std::size_t index, double t, std::span<const double> x)>;
/// Called after every step with the new time and state.
using StepObserver = std::function<void(double t, std::span<const double> x)>;

/// Fixed-step integration from t = 0 to config.padded_t_end(). Times are computed
/// as index * step, so the observer sees exactly constant spacing.
StateVector integrate(const OdeSystem& system, std::span<const double> x0,
                      const IntegrationConfig& config, const StepObserver& observer = {},
                      const StepBegin& on_step_begin = {});

}  // namespace lsfct
