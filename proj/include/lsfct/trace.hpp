#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lsfct/regression.hpp"

namespace lsfct {

/// One row of the main trace. Optional columns are written empty when absent.
struct TraceRow {
  double t = 0.0;
  double y = 0.0;
  Vector phi;
  Vector theta_hat;
  std::optional<double> z;
  std::optional<double> det_m;
  double min_eig = 0.0;
  std::optional<Vector> fct;
  double err_ls = 0.0;
  std::optional<double> err_fct;
};

inline constexpr std::string_view kTraceHeader =
    "t,y,phi1,phi2,phi3,theta_hat1,theta_hat2,theta_hat3,z,detM,min_eig,fct1,fct2,fct3,err_ls,err_fct";

/// Writes the header and one line per row, doubles at 17 significant digits.
/// Rows must carry 3-dimensional vectors.
void write_trace(const std::vector<TraceRow>& rows, const std::string& path);
std::string format_trace(const std::vector<TraceRow>& rows);

/// Inverse of write_trace; throws InputDataError on a malformed file.
std::vector<TraceRow> read_trace(const std::string& path);
std::vector<TraceRow> parse_trace(std::string_view text);

/// Per-estimator estimates: `t,<name>_theta_hat1,...` for every named estimator.
struct EstimatorTrace {
  std::vector<std::string> names;
  Eigen::Index dimension = 3;
  std::vector<double> t;
  std::vector<std::vector<Vector>> estimates;  // [row][estimator]
};

void write_estimator_trace(const EstimatorTrace& trace, const std::string& path);
EstimatorTrace read_estimator_trace(const std::string& path);

std::string format_real(double v);

}  // namespace lsfct
