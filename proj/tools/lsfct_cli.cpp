// lsfct: run least-squares / FCT estimation scenarios on the benchmark plant.
//
//   lsfct run example5 --out-dir results/example5
//   lsfct run my.cfg --noise-std 0.01 --seed 7
//   lsfct plot results/example5/trace.csv --summary results/example5/summary.json
//   lsfct presets

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lsfct/config.hpp"
#include "lsfct/errors.hpp"
#include "lsfct/plots.hpp"
#include "lsfct/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_std;
  std::optional<double> step;
  std::optional<double> t_end;
  std::string out_dir;
  bool no_plots = false;
};

struct PlotArgs {
  std::string trace;
  std::string out_dir;
  std::string theta;
  std::string summary;
  std::string estimators;
};

std::string optional_text(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << *v;
  return os.str();
}

int run(const RunArgs& args) {
  lsfct::ScenarioConfig config = lsfct::parse_config(args.config);
  if (args.seed) config.plant.noise.seed = *args.seed;
  if (args.noise_std) {
    config.plant.noise.enabled = true;
    config.plant.noise.std_dev = *args.noise_std;
  }
  if (args.step) config.integration.step = *args.step;
  if (args.t_end) config.integration.t_end = *args.t_end;

  auto& out = config.outputs;
  const bool configured = !out.trace.empty() || !out.summary.empty();
  if (!args.out_dir.empty() || !configured) {
    const fs::path dir = args.out_dir.empty() ? fs::path("results") / config.name : fs::path(args.out_dir);
    out.trace = (dir / "trace.csv").string();
    out.estimators_trace = (dir / "estimators.csv").string();
    out.summary = (dir / "summary.json").string();
    out.plots_dir = args.no_plots ? "" : (dir / "plots").string();
  } else if (args.no_plots) {
    out.plots_dir.clear();
  }
  config.validate();

  const lsfct::RunResult result = lsfct::run_scenario(config);
  const auto& s = result.summary;
  std::cout << "scenario:            " << s.name << "\n"
            << "steps:               " << s.step_count << " (t_end " << s.t_end << " s)\n"
            << "t_c:                 " << optional_text(s.t_c) << "\n"
            << "first FCT validity:  " << optional_text(s.fct_first_valid_time) << "\n"
            << "max |FCT - theta|:   " << optional_text(s.max_abs_error_after_fct) << "\n";
  for (const auto& [name, err] : s.final_errors) {
    std::cout << "final error " << name << ": " << err << "\n";
  }
  if (s.fct_determinant_dips > 0) {
    std::cerr << "warning: det(M) dipped below delta_fct " << s.fct_determinant_dips
              << " time(s) after validity\n";
  }
  std::cout << "wall time:           " << s.wall_time_s << " s\n";
  if (!out.trace.empty()) std::cout << "trace:               " << out.trace << "\n";
  if (!out.summary.empty()) std::cout << "summary:             " << out.summary << "\n";
  return 0;
}

lsfct::Vector parse_theta(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw lsfct::ConfigError("--theta: malformed entry '" + item + "'");
    }
  }
  return Eigen::Map<lsfct::Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int plot(const PlotArgs& args) {
  lsfct::PlotOptions options;
  options.estimators_trace = args.estimators;
  if (!args.theta.empty()) {
    options.theta_true = parse_theta(args.theta);
  } else if (!args.summary.empty()) {
    std::ifstream in(args.summary);
    if (!in) throw lsfct::IoError("cannot open '" + args.summary + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw lsfct::InputDataError("malformed summary '" + args.summary + "': " + e.what());
    }
    const auto config = lsfct::parse_config_text(j.at("config_echo").get<std::string>(), args.summary);
    options.theta_true = config.plant.theta_true;
  }
  if (options.estimators_trace.empty()) {
    const fs::path sibling = fs::path(args.trace).parent_path() / "estimators.csv";
    if (fs::exists(sibling)) options.estimators_trace = sibling.string();
  }
  const std::string out_dir =
      args.out_dir.empty() ? (fs::path(args.trace).parent_path() / "plots").string() : args.out_dir;
  for (const auto& path : lsfct::render_plots(args.trace, out_dir, options)) {
    std::cout << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares parameter estimation with finite convergence time"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario from a config file or preset name");
  run_cmd->add_option("config", run_args.config, "Config file path or preset name")->required();
  run_cmd->add_option("--seed", run_args.seed, "Noise seed");
  run_cmd->add_option("--noise-std", run_args.noise_std, "Enable output noise with this standard deviation");
  run_cmd->add_option("--step", run_args.step, "Integration step [s]");
  run_cmd->add_option("--t-end", run_args.t_end, "Horizon [s]");
  run_cmd->add_option("--out-dir", run_args.out_dir, "Directory for trace, summary and plots");
  run_cmd->add_flag("--no-plots", run_args.no_plots, "Skip SVG rendering");

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG plots from a trace");
  plot_cmd->add_option("trace", plot_args.trace, "Trace CSV")->required();
  plot_cmd->add_option("--out-dir", plot_args.out_dir, "Output directory (default: <trace dir>/plots)");
  plot_cmd->add_option("--theta", plot_args.theta, "True parameter, e.g. 2,3,1 (plots errors)");
  plot_cmd->add_option("--summary", plot_args.summary, "Summary JSON to take the true parameter from");
  plot_cmd->add_option("--estimators", plot_args.estimators, "Per-estimator trace CSV");

  app.add_subcommand("presets", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*plot_cmd) return plot(plot_args);
    for (const auto& name : lsfct::preset_names()) std::cout << name << "\n";
    return 0;
  } catch (const lsfct::NumericalIntegrityError& e) {
    std::cerr << "numerical error";
    if (e.has_time()) std::cerr << " at t=" << e.time();
    std::cerr << ": " << e.what() << "\n";
    return lsfct::exit_code(e.category());
  } catch (const lsfct::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lsfct::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
