#include "lsfct/benchmark_plant.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "lsfct/errors.hpp"

namespace lsfct {

PlantState PlantState::from_span(std::span<const double> x) {
  return PlantState{x[0], x[1], x[2], x[3], x[4], x[5]};
}

void PlantState::to_span(std::span<double> out) const {
  out[0] = x1;
  out[1] = x2;
  out[2] = f1;
  out[3] = f2;
  out[4] = f3;
  out[5] = fy;
}

std::string_view to_string(InputKind kind) {
  return kind == InputKind::constant ? "constant" : "sine";
}

InputKind parse_input_kind(std::string_view text) {
  if (text == "constant") return InputKind::constant;
  if (text == "sine") return InputKind::sine;
  throw ConfigError("unknown input kind '" + std::string(text) + "' (expected constant or sine)");
}

double InputSignal::operator()(double t) const {
  if (kind == InputKind::constant) return level;
  return level + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
}

void PlantConfig::validate() const {
  if (theta_true.size() != 3) {
    throw ConfigError("plant.theta_true must have exactly 3 entries");
  }
  if (!theta_true.allFinite()) {
    throw ConfigError("plant.theta_true must be finite");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("plant.lambda must be positive");
  }
  if (!std::isfinite(input.level) || !std::isfinite(input.amplitude) ||
      !std::isfinite(input.frequency) || input.frequency < 0.0) {
    throw ConfigError("plant input parameters must be finite, frequency nonnegative");
  }
  if (!(noise.std_dev >= 0.0) || !std::isfinite(noise.std_dev)) {
    throw ConfigError("noise.std_dev must be nonnegative");
  }
}

PlantConfig example5_plant() {
  PlantConfig c;
  c.theta_true = Vector{{2.0, 3.0, 1.0}};
  c.lambda = 1.0;
  c.input = InputSignal{InputKind::constant, 5.0, 0.0, 0.0};
  c.noise = NoiseConfig{};
  return c;
}

PlantState plant_derivative(const PlantState& s, const PlantConfig& config, double t) {
  const auto& th = config.theta_true;
  const double lambda = config.lambda;
  const double u = config.input(t);
  PlantState d;
  d.x1 = s.x2;
  d.x2 = -th[0] * s.x1 - th[1] * s.x2 + th[2] * u;
  d.f1 = -lambda * s.f1 - s.x1;
  d.f2 = -lambda * s.f2 - s.x2;
  d.f3 = -lambda * s.f3 + u;
  d.fy = -lambda * s.fy + s.x2;
  return d;
}

RegressorSample emit_sample(const PlantState& s, const PlantConfig& config, double t,
                            double noise_draw) {
  RegressorSample sample;
  sample.t = t;
  sample.phi = Vector{{s.f1, s.f2, s.f3}};
  // p/(p + lambda) = 1 - lambda/(p + lambda)
  sample.y = s.x2 - config.lambda * s.fy;
  if (config.noise.enabled) {
    sample.y += noise_draw;
  }
  return sample;
}

std::vector<double> noise_stream(const NoiseConfig& config, std::size_t step_count) {
  if (!config.enabled) {
    throw ConfigError("noise_stream requested with noise disabled");
  }
  if (!(config.std_dev >= 0.0)) {
    throw ConfigError("noise.std_dev must be nonnegative");
  }
  std::vector<double> draws(step_count, 0.0);
  if (config.std_dev == 0.0) {
    return draws;
  }
  std::mt19937_64 engine(config.seed);
  std::normal_distribution<double> normal(0.0, config.std_dev);
  for (double& d : draws) {
    d = normal(engine);
  }
  return draws;
}

}  // namespace lsfct
