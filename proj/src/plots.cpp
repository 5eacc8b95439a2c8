#include "lsfct/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lsfct/errors.hpp"
#include "lsfct/trace.hpp"

namespace lsfct {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string tick_label(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  void finalize(bool pad_range = true) {
    if (!std::isfinite(lo)) {
      lo = -1.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1e-3, 0.1 * std::abs(hi));
      lo -= pad;
      hi += pad;
    } else if (pad_range) {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<double>& x,
                       const std::vector<PlotSeries>& series, std::size_t max_points) {
  Range xr, yr;
  for (double v : x) xr.add(v);
  for (const auto& s : series) {
    for (const auto& v : s.y) {
      if (v) yr.add(*v);
    }
  }
  xr.finalize(false);
  yr.finalize();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double v) { return kTop + (yr.hi - v) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << escape(title) << "</text>\n";

  // Axes, grid and ticks.
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    os << "<line x1=\"" << px(xv) << "\" y1=\"" << kTop << "\" x2=\"" << px(xv) << "\" y2=\""
       << kTop + ph << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(xv) << "</text>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << py(yv) << "\" x2=\"" << kLeft + pw << "\" y2=\""
       << py(yv) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 16
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(y_label)
     << "</text>\n";

  const std::size_t n = x.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / std::max<std::size_t>(1, max_points));
  for (std::size_t s = 0; s < series.size(); ++s) {
    const PlotSeries& ser = series[s];
    std::ostringstream points;
    points << std::fixed << std::setprecision(2);
    std::size_t count = 0;
    auto flush = [&] {
      if (count > 0) {
        os << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\" points=\""
           << points.str() << "\"/>\n";
      }
      points.str("");
      count = 0;
    };
    for (std::size_t i = 0; i < n && i < ser.y.size(); ++i) {
      const bool gap = !ser.y[i] || !std::isfinite(*ser.y[i]);
      if (gap) {
        flush();
        continue;
      }
      const bool keep = i % stride == 0 || i + 1 == n || i == 0 || !ser.y[i - 1];
      if (!keep) continue;
      points << (count ? " " : "") << px(x[i]) << "," << py(*ser.y[i]);
      ++count;
    }
    flush();

    const double ly = kTop + 12 + 20.0 * static_cast<double>(s);
    const double lx = kLeft + pw + 12;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
       << "\" stroke=\"" << ser.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
       << escape(ser.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> render_plots(const std::string& trace_path, const std::string& out_dir,
                                      const PlotOptions& options) {
  namespace fs = std::filesystem;
  const std::vector<TraceRow> rows = read_trace(trace_path);
  if (options.theta_true && options.theta_true->size() != 3) {
    throw ConfigError("plot: true parameter must have 3 entries");
  }

  std::optional<EstimatorTrace> extra;
  if (!options.estimators_trace.empty()) {
    extra = read_estimator_trace(options.estimators_trace);
    if (extra->t.size() != rows.size()) {
      throw InputDataError("estimator trace and main trace have different row counts");
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create plot directory '" + out_dir + "': " + ec.message());

  std::vector<double> t;
  t.reserve(rows.size());
  for (const auto& r : rows) t.push_back(r.t);

  const bool errors = options.theta_true.has_value();
  auto offset = [&](int i) { return errors ? (*options.theta_true)[i] : 0.0; };

  std::vector<std::string> written;
  for (int i = 0; i < 3; ++i) {
    std::vector<PlotSeries> series;
    std::size_t color = 0;
    if (extra) {
      for (std::size_t e = 0; e < extra->names.size(); ++e) {
        PlotSeries s{extra->names[e], kPalette[color++ % 6], {}};
        for (const auto& row : extra->estimates) s.y.emplace_back(row[e][i] - offset(i));
        series.push_back(std::move(s));
      }
    } else {
      PlotSeries s{"LS", kPalette[color++ % 6], {}};
      for (const auto& r : rows) s.y.emplace_back(r.theta_hat[i] - offset(i));
      series.push_back(std::move(s));
    }
    PlotSeries fct{"FCT-LS", kPalette[color++ % 6], {}};
    for (const auto& r : rows) {
      fct.y.push_back(r.fct ? std::optional<double>((*r.fct)[i] - offset(i)) : std::nullopt);
    }
    series.push_back(std::move(fct));

    const std::string idx = std::to_string(i + 1);
    const std::string title = errors ? "Parameter error " + idx : "Parameter estimate " + idx;
    const std::string ylabel = errors ? "theta_tilde_" + idx : "theta_hat_" + idx;
    const fs::path path = fs::path(out_dir) / ((errors ? "theta_error_" : "theta_hat_") + idx + ".svg");
    write_text(path, render_svg(title, "t [s]", ylabel, t, series, options.max_points));
    written.push_back(path.string());
  }

  PlotSeries det{"det(I - z f0 F)", kPalette[0], {}};
  for (const auto& r : rows) det.y.push_back(r.det_m);
  const fs::path det_path = fs::path(out_dir) / "det_m.svg";
  write_text(det_path, render_svg("FCT determinant", "t [s]", "det(M)", t, {det}, options.max_points));
  written.push_back(det_path.string());

  PlotSeries eig{"min eig of Gram", kPalette[2], {}};
  for (const auto& r : rows) eig.y.emplace_back(r.min_eig);
  const fs::path eig_path = fs::path(out_dir) / "min_eig.svg";
  write_text(eig_path,
             render_svg("Excitation level", "t [s]", "min eigenvalue", t, {eig}, options.max_points));
  written.push_back(eig_path.string());

  return written;
}

}  // namespace lsfct
