#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lsfct/benchmark_plant.hpp"
#include "lsfct/estimators.hpp"
#include "lsfct/integrator.hpp"

namespace lsfct {

enum class EstimatorKind { ls_ff, ls_standard, gradient, fct };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view text);

struct OutputConfig {
  std::string trace;             // main CSV trace
  std::string estimators_trace;  // CSV with every selected estimator's estimate
  std::string summary;           // JSON run summary
  std::string plots_dir;         // SVG plots, rendered after the run
};

struct ScenarioConfig {
  std::string name = "custom";
  PlantConfig plant;
  LsGains gains{30.3, 4.0, 6.0, 10.0};
  double gradient_gamma = 10.0;
  ParamVector theta_hat0 = Vector::Constant(3, 0.1);
  double delta_fct = kDefaultDeltaFct;
  double rho_threshold = kDefaultRhoThreshold;
  IntegrationConfig integration;
  std::vector<EstimatorKind> estimators;  // unique, in canonical order
  OutputConfig outputs;

  bool has(EstimatorKind kind) const;

  /// Cross-field checks: dimensions, at least one estimator, fct requires ls_ff.
  void validate() const;
};

/// Reads a flat `section.key = value` file, or resolves a built-in preset name
/// when no such file exists. Unknown keys and duplicates are errors.
ScenarioConfig parse_config(const std::string& path_or_preset);

ScenarioConfig parse_config_text(std::string_view text, std::string_view source = "<config>");

/// Canonical text form of a resolved configuration; parse_config_text of the
/// result reproduces the configuration exactly.
std::string to_config_text(const ScenarioConfig& config);

std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
ScenarioConfig preset(std::string_view name);

}  // namespace lsfct
