#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "lsfct/benchmark_plant.hpp"
#include "lsfct/estimators.hpp"
#include "lsfct/integrator.hpp"

namespace lsfct::test_support {

/// Benchmark plant coupled to a single estimator; the observer sees t = 0 and every step.
inline StateVector run_plant_with(
    const Estimator& estimator, const PlantConfig& plant, const IntegrationConfig& integration,
    const std::function<void(double, const PlantState&, std::span<const double>)>& observer) {
  const std::size_t n_est = estimator.state_size();
  OdeSystem system;
  system.dimension = PlantState::kSize + n_est;
  system.rhs = [&](double t, std::span<const double> x, std::span<double> dx) {
    const PlantState p = PlantState::from_span(x.first(PlantState::kSize));
    plant_derivative(p, plant, t).to_span(dx.first(PlantState::kSize));
    estimator.derivative(x.subspan(PlantState::kSize), emit_sample(p, plant, t),
                         dx.subspan(PlantState::kSize));
  };
  StateVector x0(system.dimension, 0.0);
  estimator.initial_state(std::span<double>(x0).subspan(PlantState::kSize));
  auto notify = [&](double t, std::span<const double> x) {
    estimator.check_state(x.subspan(PlantState::kSize), t);
    observer(t, PlantState::from_span(x.first(PlantState::kSize)), x.subspan(PlantState::kSize));
  };
  notify(0.0, x0);
  return integrate(system, x0, integration, notify);
}

/// Eigenvalues of a symmetric 3x3 matrix from the trigonometric solution of its
/// characteristic cubic, ascending. Independent of any iterative eigen-solver.
inline std::vector<double> cubic_eigenvalues(const Matrix& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {q, q, q};
  const Matrix b = (a - q * Matrix::Identity(3, 3)) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {lo, 3.0 * q - hi - lo, hi};
}

}  // namespace lsfct::test_support
