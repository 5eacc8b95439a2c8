#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lsfct/regression.hpp"

namespace lsfct {

struct PlotOptions {
  // With the true parameter the per-parameter plots show errors theta_hat_i - theta_i,
  // otherwise the raw estimates.
  std::optional<Vector> theta_true;
  // Optional per-estimator trace; adds one curve per estimator to each parameter plot.
  std::string estimators_trace;
  std::size_t max_points = 2000;
};

/// Renders static SVG line plots from a trace: one per parameter, det(M)(t) and
/// min_eig(t). Missing values (empty FCT cells) break the curve instead of being
/// drawn as zero. Returns the written file paths.
std::vector<std::string> render_plots(const std::string& trace_path, const std::string& out_dir,
                                      const PlotOptions& options = {});

/// One curve: y[i] belongs to the shared abscissa x[i]; nullopt is a gap.
struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<std::optional<double>> y;
};

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<double>& x,
                       const std::vector<PlotSeries>& series, std::size_t max_points = 2000);

}  // namespace lsfct
