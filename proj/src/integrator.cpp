#include "lsfct/integrator.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "lsfct/errors.hpp"

namespace lsfct {

namespace {

void evaluate(const OdeSystem& system, double t, std::span<const double> x, std::span<double> out,
              int stage) {
  system.rhs(t, x, out);
  for (double v : out) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite derivative at t=" << t << " (stage " << stage << ")";
      throw NumericalIntegrityError(os.str(), t);
    }
  }
}

void require_input(const OdeSystem& system, std::span<const double> x, double h) {
  if (x.size() != system.dimension) {
    throw ConfigError("state dimension does not match the ODE system");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ConfigError("integration step must be positive");
  }
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::rk4 ? "rk4" : "euler";
}

Method parse_method(std::string_view text) {
  if (text == "rk4") return Method::rk4;
  if (text == "euler") return Method::euler;
  throw ConfigError("unknown integration method '" + std::string(text) + "' (expected rk4 or euler)");
}

void IntegrationConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ConfigError("integration.step must be positive");
  }
  if (!(t_end > step) || !std::isfinite(t_end)) {
    throw ConfigError("integration.t_end must exceed integration.step");
  }
}

std::size_t IntegrationConfig::step_count() const {
  // Relative slack so that 10 / 1e-4 is not padded because of round-off.
  const double ratio = t_end / step;
  return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
}

bool IntegrationConfig::padded() const {
  return std::abs(padded_t_end() - t_end) > 1e-12 * t_end;
}

StateVector step_rk4(const OdeSystem& system, double t, std::span<const double> x, double h) {
  require_input(system, x, h);
  const std::size_t n = x.size();
  StateVector k1(n), k2(n), k3(n), k4(n), tmp(n);
  const double half = 0.5 * h;

  evaluate(system, t, x, k1, 1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + half * k1[i];
  evaluate(system, t + half, tmp, k2, 2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + half * k2[i];
  evaluate(system, t + half, tmp, k3, 3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  evaluate(system, t + h, tmp, k4, 4);

  StateVector next(n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(next[i])) {
      throw NumericalIntegrityError("non-finite state after RK4 step", t + h);
    }
  }
  return next;
}

StateVector step_euler(const OdeSystem& system, double t, std::span<const double> x, double h) {
  require_input(system, x, h);
  const std::size_t n = x.size();
  StateVector k(n);
  evaluate(system, t, x, k, 1);
  StateVector next(n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = x[i] + h * k[i];
    if (!std::isfinite(next[i])) {
      throw NumericalIntegrityError("non-finite state after Euler step", t + h);
    }
  }
  return next;
}

StateVector integrate(const OdeSystem& system, std::span<const double> x0,
                      const IntegrationConfig& config, const StepObserver& observer,
                      const StepBegin& on_step_begin) {
  config.validate();
  if (x0.size() != system.dimension) {
    throw ConfigError("initial state dimension does not match the ODE system");
  }
  for (double v : x0) {
    if (!std::isfinite(v)) throw InputDataError("non-finite initial state");
  }

  const std::size_t steps = config.step_count();
  const double h = config.step;
  StateVector x(x0.begin(), x0.end());
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * h;
    if (on_step_begin) on_step_begin(i, t, x);
    try {
      x = config.method == Method::rk4 ? step_rk4(system, t, x, h) : step_euler(system, t, x, h);
    } catch (const NumericalIntegrityError& e) {
      if (e.has_time()) throw;
      throw NumericalIntegrityError(e.what(), t);
    }
    if (observer) observer(static_cast<double>(i + 1) * h, x);
  }
  return x;
}

}  // namespace lsfct
