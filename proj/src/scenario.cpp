#include "lsfct/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "lsfct/errors.hpp"
#include "lsfct/plots.hpp"

namespace lsfct {

namespace {

struct Block {
  std::unique_ptr<Estimator> estimator;
  std::size_t offset = 0;
};

std::vector<Block> build_estimators(const ScenarioConfig& c, std::size_t offset) {
  std::vector<Block> blocks;
  auto add = [&](std::unique_ptr<Estimator> e) {
    const std::size_t size = e->state_size();
    blocks.push_back(Block{std::move(e), offset});
    offset += size;
  };
  for (EstimatorKind kind : c.estimators) {
    switch (kind) {
      case EstimatorKind::ls_ff:
        add(std::make_unique<LsForgettingEstimator>(c.gains, c.theta_hat0));
        break;
      case EstimatorKind::ls_standard:
        add(std::make_unique<LsStandardEstimator>(c.gains.f0(), c.theta_hat0));
        break;
      case EstimatorKind::gradient:
        add(std::make_unique<GradientEstimator>(c.gradient_gamma, c.theta_hat0));
        break;
      case EstimatorKind::fct:
        break;  // algebraic, reads the ls_ff block
    }
  }
  return blocks;
}

class Recorder {
 public:
  Recorder(const ScenarioConfig& c, const std::vector<Block>& blocks, std::vector<double> noise)
      : config_(c),
        blocks_(blocks),
        noise_(std::move(noise)),
        monitor_(c.plant.theta_true.size(), c.rho_threshold) {
    for (const Block& b : blocks_) {
      if (auto* ls = dynamic_cast<const LsForgettingEstimator*>(b.estimator.get())) {
        ls_ff_ = ls;
        ls_ff_offset_ = b.offset;
      }
    }
    if (c.has(EstimatorKind::fct) && ls_ff_) {
      fct_.emplace(c.gains, c.theta_hat0, c.delta_fct);
    }
    result_.estimators.dimension = c.plant.theta_true.size();
    for (const Block& b : blocks_) result_.estimators.names.push_back(b.estimator->name());
  }

  double noise_at(std::size_t index) const { return noise_.empty() ? 0.0 : noise_[index]; }

  void record(std::size_t index, double t, std::span<const double> x) {
    for (const Block& b : blocks_) {
      b.estimator->check_state(x.subspan(b.offset, b.estimator->state_size()), t);
    }
    const PlantState plant = PlantState::from_span(x.first(PlantState::kSize));
    const RegressorSample sample = emit_sample(plant, config_.plant, t, noise_at(index));
    // The t = 0 sample only seeds the trapezoidal rule.
    monitor_ = gram_update(std::move(monitor_), sample, config_.integration.step);

    const Vector& theta = config_.plant.theta_true;
    TraceRow row;
    row.t = t;
    row.y = sample.y;
    row.phi = sample.phi;
    row.min_eig = monitor_.min_eig;

    std::vector<Vector> estimates;
    for (const Block& b : blocks_) {
      estimates.push_back(b.estimator->estimate(x.subspan(b.offset, b.estimator->state_size())));
    }
    row.theta_hat = estimates.front();
    row.err_ls = parameter_error(row.theta_hat, theta);

    if (ls_ff_) {
      const LsState s = ls_ff_->unpack(x.subspan(ls_ff_offset_, ls_ff_->state_size()), t);
      row.z = s.z;
      if (fct_) {
        row.fct = fct_->observe(s);
        row.det_m = fct_->last_determinant();
        if (row.fct) {
          row.err_fct = parameter_error(*row.fct, theta);
          const double dev = (*row.fct - theta).cwiseAbs().maxCoeff();
          auto& m = result_.summary.max_abs_error_after_fct;
          m = m ? std::max(*m, dev) : dev;
        }
      } else {
        const auto q = theta.size();
        row.det_m =
            (Matrix::Identity(q, q) - (s.z * config_.gains.f0()) * s.F).partialPivLu().determinant();
      }
    }

    result_.estimators.t.push_back(t);
    result_.estimators.estimates.push_back(std::move(estimates));
    result_.rows.push_back(std::move(row));
  }

  RunResult finish() {
    RunSummary& s = result_.summary;
    s.name = config_.name;
    s.t_c = monitor_.t_c;
    s.step_count = config_.integration.step_count();
    s.t_end = config_.integration.padded_t_end();
    s.horizon_padded = config_.integration.padded();
    s.config_echo = to_config_text(config_);
    if (!result_.rows.empty()) {
      const auto& last = result_.estimators.estimates.back();
      for (std::size_t i = 0; i < blocks_.size(); ++i) {
        s.final_errors[blocks_[i].estimator->name()] =
            parameter_error(last[i], config_.plant.theta_true);
      }
      if (result_.rows.back().err_fct) s.final_errors["fct"] = *result_.rows.back().err_fct;
    }
    if (fct_) {
      s.fct_first_valid_time = fct_->first_valid_time();
      s.fct_latched = fct_->latched();
      s.fct_determinant_dips = fct_->determinant_dips();
    }
    return std::move(result_);
  }

  const RunResult& partial() const { return result_; }

 private:
  const ScenarioConfig& config_;
  const std::vector<Block>& blocks_;
  std::vector<double> noise_;
  ExcitationRecord monitor_;
  const LsForgettingEstimator* ls_ff_ = nullptr;
  std::size_t ls_ff_offset_ = 0;
  std::optional<FctTracker> fct_;
  RunResult result_;
};

void ensure_parent(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
}

RunResult simulate_impl(const ScenarioConfig& config, std::vector<TraceRow>* partial_rows) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  const std::vector<Block> blocks = build_estimators(config, PlantState::kSize);
  std::size_t dimension = PlantState::kSize;
  for (const Block& b : blocks) dimension += b.estimator->state_size();

  const std::size_t steps = config.integration.step_count();
  std::vector<double> noise;
  if (config.plant.noise.enabled) noise = noise_stream(config.plant.noise, steps + 1);

  Recorder recorder(config, blocks, noise);
  double held_noise = recorder.noise_at(0);

  OdeSystem system;
  system.dimension = dimension;
  system.rhs = [&](double t, std::span<const double> x, std::span<double> dx) {
    const PlantState plant = PlantState::from_span(x.first(PlantState::kSize));
    const RegressorSample sample = emit_sample(plant, config.plant, t, held_noise);
    plant_derivative(plant, config.plant, t).to_span(dx.first(PlantState::kSize));
    for (const Block& b : blocks) {
      const std::size_t n = b.estimator->state_size();
      b.estimator->derivative(x.subspan(b.offset, n), sample, dx.subspan(b.offset, n));
    }
  };

  StateVector x0(dimension, 0.0);
  PlantState{}.to_span(std::span<double>(x0).first(PlantState::kSize));
  for (const Block& b : blocks) {
    b.estimator->initial_state(std::span<double>(x0).subspan(b.offset, b.estimator->state_size()));
  }

  std::size_t index = 0;
  try {
    recorder.record(0, 0.0, x0);
    integrate(
        system, x0, config.integration,
        [&](double t, std::span<const double> x) { recorder.record(++index, t, x); },
        [&](std::size_t i, double, std::span<const double>) { held_noise = recorder.noise_at(i); });
  } catch (const NumericalIntegrityError&) {
    if (partial_rows) *partial_rows = recorder.partial().rows;
    throw;
  }

  RunResult result = recorder.finish();
  result.summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace

RunResult simulate(const ScenarioConfig& config) {
  return simulate_impl(config, nullptr);
}

RunResult run_scenario(const ScenarioConfig& config) {
  std::vector<TraceRow> partial;
  try {
    RunResult result = simulate_impl(config, &partial);
    write_outputs(config, result);
    return result;
  } catch (const NumericalIntegrityError&) {
    if (!config.outputs.trace.empty()) {
      ensure_parent(config.outputs.trace);
      write_trace(partial, config.outputs.trace);
    }
    throw;
  }
}

std::string summary_json(const RunSummary& s) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) -> ordered_json {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  ordered_json j;
  j["name"] = s.name;
  j["t_c"] = opt(s.t_c);
  ordered_json errors = ordered_json::object();
  for (const auto& [name, err] : s.final_errors) errors[name] = err;
  j["final_errors"] = errors;
  j["fct_first_valid_time"] = opt(s.fct_first_valid_time);
  if (s.fct_latched) {
    j["fct_latched_value"] = std::vector<double>(s.fct_latched->begin(), s.fct_latched->end());
  } else {
    j["fct_latched_value"] = nullptr;
  }
  j["max_abs_error_after_fct"] = opt(s.max_abs_error_after_fct);
  j["fct_determinant_dips"] = s.fct_determinant_dips;
  j["step_count"] = s.step_count;
  j["t_end"] = s.t_end;
  j["horizon_padded"] = s.horizon_padded;
  j["wall_time_s"] = s.wall_time_s;
  j["config_echo"] = s.config_echo;
  return j.dump(2) + "\n";
}

void write_outputs(const ScenarioConfig& config, const RunResult& result) {
  const OutputConfig& out = config.outputs;
  if (!out.trace.empty()) {
    ensure_parent(out.trace);
    write_trace(result.rows, out.trace);
  }
  if (!out.estimators_trace.empty()) {
    ensure_parent(out.estimators_trace);
    write_estimator_trace(result.estimators, out.estimators_trace);
  }
  if (!out.summary.empty()) {
    ensure_parent(out.summary);
    std::ofstream f(out.summary, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + out.summary + "' for writing");
    f << summary_json(result.summary);
    if (!f) throw IoError("write to '" + out.summary + "' failed");
  }
  if (!out.plots_dir.empty()) {
    if (out.trace.empty()) throw ConfigError("outputs.plots_dir requires outputs.trace");
    PlotOptions options;
    options.theta_true = config.plant.theta_true;
    options.estimators_trace = out.estimators_trace;
    render_plots(out.trace, out.plots_dir, options);
  }
}

}  // namespace lsfct
