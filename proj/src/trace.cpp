#include "lsfct/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lsfct/errors.hpp"

namespace lsfct {

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

void append_optional(std::string& out, const std::optional<double>& v) {
  if (v) append_real(out, *v);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  while (true) {
    const auto comma = line.find(',');
    cells.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return cells;
}

double parse_real(std::string_view cell, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    std::ostringstream os;
    os << "trace line " << line << ": malformed number '" << cell << "'";
    throw InputDataError(os.str());
  }
  return v;
}

std::optional<double> parse_optional(std::string_view cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  return parse_real(cell, line);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

}  // namespace

std::string format_real(double v) {
  std::string s;
  append_real(s, v);
  return s;
}

std::string format_trace(const std::vector<TraceRow>& rows) {
  std::string out(kTraceHeader);
  out += '\n';
  out.reserve(out.size() + rows.size() * 320);
  for (const TraceRow& r : rows) {
    if (r.phi.size() != 3 || r.theta_hat.size() != 3 || (r.fct && r.fct->size() != 3)) {
      throw InputDataError("trace rows must carry 3-dimensional vectors");
    }
    append_real(out, r.t);
    out += ',';
    append_real(out, r.y);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      append_real(out, r.phi[i]);
    }
    for (int i = 0; i < 3; ++i) {
      out += ',';
      append_real(out, r.theta_hat[i]);
    }
    out += ',';
    append_optional(out, r.z);
    out += ',';
    append_optional(out, r.det_m);
    out += ',';
    append_real(out, r.min_eig);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      if (r.fct) append_real(out, (*r.fct)[i]);
    }
    out += ',';
    append_real(out, r.err_ls);
    out += ',';
    append_optional(out, r.err_fct);
    out += '\n';
  }
  return out;
}

void write_trace(const std::vector<TraceRow>& rows, const std::string& path) {
  write_file(path, format_trace(rows));
}

std::vector<TraceRow> parse_trace(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kTraceHeader) {
    throw InputDataError("trace does not start with the expected header");
  }
  std::vector<TraceRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto c = split_csv(lines[n]);
    if (c.size() != 16) {
      std::ostringstream os;
      os << "trace line " << n + 1 << ": expected 16 columns, got " << c.size();
      throw InputDataError(os.str());
    }
    const std::size_t ln = n + 1;
    TraceRow r;
    r.t = parse_real(c[0], ln);
    r.y = parse_real(c[1], ln);
    r.phi = Vector{{parse_real(c[2], ln), parse_real(c[3], ln), parse_real(c[4], ln)}};
    r.theta_hat = Vector{{parse_real(c[5], ln), parse_real(c[6], ln), parse_real(c[7], ln)}};
    r.z = parse_optional(c[8], ln);
    r.det_m = parse_optional(c[9], ln);
    r.min_eig = parse_real(c[10], ln);
    const bool any_fct = !c[11].empty() || !c[12].empty() || !c[13].empty();
    if (any_fct) {
      r.fct = Vector{{parse_real(c[11], ln), parse_real(c[12], ln), parse_real(c[13], ln)}};
    }
    r.err_ls = parse_real(c[14], ln);
    r.err_fct = parse_optional(c[15], ln);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TraceRow> read_trace(const std::string& path) {
  return parse_trace(read_file(path));
}

void write_estimator_trace(const EstimatorTrace& trace, const std::string& path) {
  std::string out = "t";
  for (const auto& name : trace.names) {
    for (Eigen::Index i = 0; i < trace.dimension; ++i) {
      out += "," + name + "_theta_hat" + std::to_string(i + 1);
    }
  }
  out += '\n';
  for (std::size_t row = 0; row < trace.t.size(); ++row) {
    append_real(out, trace.t[row]);
    for (const Vector& v : trace.estimates[row]) {
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += ',';
        append_real(out, v[i]);
      }
    }
    out += '\n';
  }
  write_file(path, out);
}

EstimatorTrace read_estimator_trace(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  if (lines.empty()) throw InputDataError("empty estimator trace '" + path + "'");
  const auto header = split_csv(lines.front());
  if (header.empty() || header.front() != "t") {
    throw InputDataError("estimator trace '" + path + "' does not start with a t column");
  }
  EstimatorTrace trace;
  Eigen::Index dim = 0;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto pos = header[i].rfind("_theta_hat");
    if (pos == std::string_view::npos) {
      throw InputDataError("unexpected estimator trace column '" + std::string(header[i]) + "'");
    }
    const std::string name(header[i].substr(0, pos));
    if (trace.names.empty() || trace.names.back() != name) {
      trace.names.push_back(name);
      dim = 0;
    }
    ++dim;
  }
  trace.dimension = trace.names.empty() ? 0 : dim;
  const std::size_t expected = 1 + trace.names.size() * static_cast<std::size_t>(trace.dimension);
  if (header.size() != expected) {
    throw InputDataError("estimator trace '" + path + "' has inconsistent columns");
  }
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto c = split_csv(lines[n]);
    if (c.size() != expected) {
      std::ostringstream os;
      os << "estimator trace line " << n + 1 << ": expected " << expected << " columns";
      throw InputDataError(os.str());
    }
    trace.t.push_back(parse_real(c[0], n + 1));
    std::vector<Vector> row;
    std::size_t col = 1;
    for (std::size_t e = 0; e < trace.names.size(); ++e) {
      Vector v(trace.dimension);
      for (Eigen::Index i = 0; i < trace.dimension; ++i) v[i] = parse_real(c[col++], n + 1);
      row.push_back(std::move(v));
    }
    trace.estimates.push_back(std::move(row));
  }
  return trace;
}

}  // namespace lsfct
