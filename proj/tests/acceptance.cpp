// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "lsfct/scenario.hpp"
#include "support.hpp"

using namespace lsfct;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-34s %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

ScenarioConfig with_estimate(Vector theta0) {
  ScenarioConfig c = preset("example5");
  c.estimators = {EstimatorKind::ls_ff, EstimatorKind::fct};
  c.theta_hat0 = std::move(theta0);
  return c;
}

std::map<std::size_t, Vector> valid_fct(const RunResult& r) {
  std::map<std::size_t, Vector> out;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.rows[i].fct) out.emplace(i, *r.rows[i].fct);
  }
  return out;
}

}  // namespace

int main() {
  constexpr double kFctTol = 1e-4;
  const ScenarioConfig example5 = preset("example5");
  const Vector theta = example5.plant.theta_true;

  const auto started = std::chrono::steady_clock::now();
  const RunResult reference = simulate(example5);
  const double reference_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  report(1, "FCT exactness (example5)", [&] {
    double worst = 0.0;
    std::size_t valid = 0;
    for (const TraceRow& row : reference.rows) {
      if (!row.fct) continue;
      ++valid;
      worst = std::max(worst, (*row.fct - theta).cwiseAbs().maxCoeff());
    }
    const bool pass = valid > 0 && worst <= kFctTol && reference_seconds < 10.0;
    return Outcome{pass, fmt("max |theta_FCT - theta| = %.3g over %.0f valid steps, runtime %.2f s",
                             worst, static_cast<double>(valid), reference_seconds)};
  });

  report(2, "Initial-condition independence", [&] {
    const auto base = valid_fct(simulate(with_estimate(Vector::Constant(3, 0.1))));
    double worst = 0.0;
    bool overlap = true;
    for (double level : {-1.0, 0.0, 5.0}) {
      const auto other = valid_fct(simulate(with_estimate(Vector::Constant(3, level))));
      std::size_t compared = 0;
      for (const auto& [i, v] : other) {
        auto it = base.find(i);
        if (it == base.end()) continue;
        worst = std::max(worst, (v - it->second).cwiseAbs().maxCoeff());
        ++compared;
      }
      overlap = overlap && compared > 0;
    }
    return Outcome{overlap && worst <= kFctTol,
                   fmt("max component change %.3g across theta_hat(0) in {-1,0,5}^3 diag", worst)};
  });

  // Criteria 3 and 4 share one no-forgetting run on the benchmark plant.
  double conservation = 0.0, conservation_bound = 0.0, identity = 0.0;
  {
    const Vector theta0 = example5.theta_hat0;
    const double f0 = example5.gains.f0();
    const LsStandardEstimator est(f0, theta0);
    const Vector tilde0 = theta0 - theta;
    const Vector invariant0 = f0 * tilde0;
    conservation_bound = 1e-6 * (1.0 + invariant0.norm());
    test_support::run_plant_with(est, example5.plant, example5.integration,
                            [&](double t, const PlantState&, std::span<const double> x) {
                              const LsState s = est.unpack(x, t);
                              const Vector tilde = s.theta_hat - theta;
                              conservation = std::max(conservation, (s.F.ldlt().solve(tilde) - invariant0).norm());
                              const Vector predicted = s.F * (f0 * tilde0);
                              identity = std::max(identity, (tilde - predicted).norm() / predicted.norm());
                            });
  }
  report(3, "Conservation law (no forgetting)", [&] {
    return Outcome{conservation <= conservation_bound,
                   fmt("max ||F^-1 theta_tilde - const|| = %.3g (bound %.3g)", conservation, conservation_bound)};
  });
  report(4, "Closed-loop identity", [&] {
    return Outcome{identity <= 1e-6, fmt("max relative mismatch %.3g (bound 1e-6)", identity)};
  });

  report(5, "LS-FF non-convergence under IE", [&] {
    ScenarioConfig c = example5;
    c.estimators = {EstimatorKind::ls_ff};
    const RunResult r = simulate(c);
    const double err = r.summary.final_errors.at("ls_ff");
    const double fct = reference.summary.max_abs_error_after_fct.value_or(INFINITY);
    return Outcome{err > 0.05 && fct <= kFctTol,
                   fmt("||theta_tilde_LS(10)|| = %.4f (> 0.05), FCT max error %.3g", err, fct)};
  });

  report(6, "Scalar Riccati oracle", [&] {
    const double c = 2.0, F0 = 0.25;
    const LsStandardEstimator est(1.0 / F0, Vector::Zero(1));
    OdeSystem sys;
    sys.dimension = est.state_size();
    sys.rhs = [&](double t, std::span<const double> x, std::span<double> dx) {
      est.derivative(x, RegressorSample{t, 0.0, Vector::Constant(1, c)}, dx);
    };
    StateVector x0(sys.dimension);
    est.initial_state(x0);
    IntegrationConfig ic;
    ic.step = 1e-3;
    ic.t_end = 1.0;
    double worst = 0.0;
    integrate(sys, x0, ic, [&](double t, std::span<const double> x) {
      worst = std::max(worst, std::abs(x[1] - F0 / (1.0 + F0 * c * c * t)));
    });
    return Outcome{worst <= 1e-8, fmt("max |F - F0/(1+F0 c^2 t)| = %.3g (bound 1e-8)", worst)};
  });

  report(7, "No excitation (u = 0)", [&] {
    const RunResult r = simulate(preset("zero-input"));
    double peak = 0.0;
    bool any_fct = false;
    for (const TraceRow& row : r.rows) {
      peak = std::max(peak, row.min_eig);
      any_fct = any_fct || row.fct.has_value();
    }
    const bool pass = peak < preset("zero-input").rho_threshold && !any_fct && !r.summary.t_c;
    return Outcome{pass, fmt("peak min_eig %.3g, FCT valid steps %.0f", peak, any_fct ? 1.0 : 0.0)};
  });

  report(8, "Noise robustness", [&] {
    const ScenarioConfig c = preset("example5-noise");
    const double sigma = c.plant.noise.std_dev;
    const RunResult r = simulate(c);
    bool bounded = true;
    Vector sum = Vector::Zero(3);
    std::size_t n = 0;
    for (const TraceRow& row : r.rows) {
      bounded = bounded && row.theta_hat.allFinite() && (!row.z || std::isfinite(*row.z)) &&
                (!row.fct || row.fct->allFinite());
      for (const auto& v : r.estimators.estimates[static_cast<std::size_t>(&row - r.rows.data())]) {
        bounded = bounded && v.allFinite();
      }
      if (row.t >= 5.0 && row.t <= 10.0) {
        if (!row.fct) return Outcome{false, fmt("FCT invalid at t = %.4f", row.t)};
        sum += *row.fct;
        ++n;
      }
    }
    const Vector mean = sum / static_cast<double>(n);
    const double offset = (mean - theta).cwiseAbs().maxCoeff();
    const double peak = r.summary.max_abs_error_after_fct.value_or(INFINITY);
    const bool pass = bounded && offset <= 10.0 * sigma && std::isfinite(peak);
    return Outcome{pass, fmt("mean offset on [5,10] %.3g (bound %.3g), peak deviation %.3g", offset,
                             10.0 * sigma, peak)};
  });

  report(9, "RK4 convergence order", [&] {
    OdeSystem sys;
    sys.dimension = 1;
    sys.rhs = [](double, std::span<const double> x, std::span<double> dx) { dx[0] = x[0]; };
    auto error = [&](double h) {
      IntegrationConfig ic;
      ic.step = h;
      ic.t_end = 1.0;
      const StateVector x0{1.0};
      return std::abs(integrate(sys, x0, ic)[0] - std::exp(1.0));
    };
    const double order = std::log2(error(0.1) / error(0.05));
    return Outcome{order >= 3.7 && order <= 4.3, fmt("empirical order %.3f (range [3.7, 4.3])", order)};
  });

  report(10, "Determinism", [&] {
    std::size_t identical = 0;
    const auto names = preset_names();
    for (const auto& name : names) {
      const ScenarioConfig c = preset(name);
      if (format_trace(simulate(c).rows) == format_trace(simulate(c).rows)) ++identical;
    }
    return Outcome{identical == names.size(),
                   fmt("%.0f of %.0f presets byte-identical across two runs", static_cast<double>(identical),
                       static_cast<double>(names.size()))};
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
