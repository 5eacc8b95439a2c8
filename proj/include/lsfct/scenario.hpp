#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsfct/config.hpp"
#include "lsfct/trace.hpp"

namespace lsfct {

struct RunSummary {
  std::string name;
  std::optional<double> t_c;
  std::map<std::string, double> final_errors;  // per estimator, "fct" when valid at the end
  std::optional<double> fct_first_valid_time;
  std::optional<ParamVector> fct_latched;
  std::optional<double> max_abs_error_after_fct;  // max over valid rows and components
  std::size_t fct_determinant_dips = 0;
  std::size_t step_count = 0;
  double t_end = 0.0;
  bool horizon_padded = false;
  double wall_time_s = 0.0;
  std::string config_echo;
};

struct RunResult {
  RunSummary summary;
  std::vector<TraceRow> rows;
  EstimatorTrace estimators;
};

/// Integrates plant, filters and every selected estimator as one coupled ODE,
/// feeding the excitation monitor and the FCT reconstruction after every step.
/// Configured outputs are written at the end. A numerical-integrity failure
/// flushes the partial trace before the error propagates.
RunResult run_scenario(const ScenarioConfig& config);

/// Same as run_scenario but never touches the filesystem.
RunResult simulate(const ScenarioConfig& config);

std::string summary_json(const RunSummary& summary);
void write_outputs(const ScenarioConfig& config, const RunResult& result);

}  // namespace lsfct
