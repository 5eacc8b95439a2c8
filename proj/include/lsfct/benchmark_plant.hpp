#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lsfct/regression.hpp"

namespace lsfct {

/// Second-order plant
///   x1' = x2,  x2' = -theta1 x1 - theta2 x2 + theta3 u
/// with first-order filters 1/(p + lambda) on -x1, -x2 (= -p x1), u and x2.
struct PlantState {
  double x1 = 0.0;
  double x2 = 0.0;
  double f1 = 0.0;  // H[-x1]
  double f2 = 0.0;  // H[-x2]
  double f3 = 0.0;  // H[u]
  double fy = 0.0;  // H[x2]

  static constexpr std::size_t kSize = 6;

  static PlantState from_span(std::span<const double> x);
  void to_span(std::span<double> out) const;
};

enum class InputKind { constant, sine };

std::string_view to_string(InputKind kind);
InputKind parse_input_kind(std::string_view text);

/// u(t) = level for constant input; u(t) = level + amplitude sin(2 pi frequency t) for sine.
struct InputSignal {
  InputKind kind = InputKind::constant;
  double level = 5.0;
  double amplitude = 0.0;
  double frequency = 0.0;  // Hz

  double operator()(double t) const;
};

struct NoiseConfig {
  bool enabled = false;
  double std_dev = 0.01;
  std::uint64_t seed = 1;
};

struct PlantConfig {
  ParamVector theta_true;
  double lambda = 1.0;
  InputSignal input;
  NoiseConfig noise;

  /// Throws ConfigError on a non-3-vector theta, non-positive lambda or bad noise settings.
  void validate() const;
};

/// theta = (2, 3, 1), lambda = 1, u = 5, noiseless.
PlantConfig example5_plant();

PlantState plant_derivative(const PlantState& state, const PlantConfig& config, double t);

/// phi = (f1, f2, f3), y = x2 - lambda fy (+ noise_draw). No signal is differentiated.
RegressorSample emit_sample(const PlantState& state, const PlantConfig& config, double t,
                            double noise_draw = 0.0);

/// Seeded zero-mean Gaussian draws, one per integration step.
std::vector<double> noise_stream(const NoiseConfig& config, std::size_t step_count);

}  // namespace lsfct
