#include "lsfct/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "lsfct/errors.hpp"

namespace lsfct {

namespace {

constexpr EstimatorKind kCanonicalOrder[] = {EstimatorKind::ls_ff, EstimatorKind::fct,
                                             EstimatorKind::ls_standard, EstimatorKind::gradient};

struct Entry {
  std::string value;
  int line = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto comma = s.find(',');
    parts.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return parts;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class Reader {
 public:
  Reader(std::string_view source, std::map<std::string, Entry> entries)
      : source_(source), entries_(std::move(entries)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    std::ostringstream os;
    os << source_;
    if (auto it = entries_.find(key); it != entries_.end()) os << ":" << it->second.line;
    os << ": key '" << key << "': " << message;
    throw ConfigError(os.str());
  }

  const Entry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void real(const std::string& key, double& out) const {
    if (const Entry* e = find(key)) out = to_real(key, e->value);
  }

  void text(const std::string& key, std::string& out) const {
    if (const Entry* e = find(key)) out = e->value;
  }

  void boolean(const std::string& key, bool& out) const {
    const Entry* e = find(key);
    if (!e) return;
    if (e->value == "true") {
      out = true;
    } else if (e->value == "false") {
      out = false;
    } else {
      fail(key, "expected true or false, got '" + e->value + "'");
    }
  }

  void unsigned64(const std::string& key, std::uint64_t& out) const {
    const Entry* e = find(key);
    if (!e) return;
    const auto& v = e->value;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
      fail(key, "expected a nonnegative integer, got '" + v + "'");
    }
  }

  bool vector(const std::string& key, Vector& out) const {
    const Entry* e = find(key);
    if (!e) return false;
    const auto parts = split_list(e->value);
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = to_real(key, std::string(parts[i]));
    }
    out = v;
    return true;
  }

  template <typename Fn>
  auto guarded(const std::string& key, Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  }

 private:
  double to_real(const std::string& key, const std::string& v) const {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
      fail(key, "expected a number, got '" + v + "'");
    }
    return out;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "name",
      "preset",
      "plant.theta_true",
      "plant.lambda",
      "plant.input",
      "plant.input_level",
      "plant.input_amplitude",
      "plant.input_frequency",
      "noise.enabled",
      "noise.std_dev",
      "noise.seed",
      "gains.gamma_F",
      "gains.f0",
      "gains.chi0",
      "gains.k",
      "gains.norm",
      "gains.gamma_gradient",
      "theta_hat0",
      "delta_fct",
      "rho_threshold",
      "integration.step",
      "integration.t_end",
      "integration.method",
      "estimators",
      "outputs.trace",
      "outputs.estimators_trace",
      "outputs.summary",
      "outputs.plots_dir",
  };
  return keys;
}

ScenarioConfig example5() {
  ScenarioConfig c;
  c.name = "example5";
  c.plant = example5_plant();
  c.gains = LsGains(30.3, 4.0, 6.0, 10.0);
  c.theta_hat0 = Vector::Constant(3, 0.1);
  c.delta_fct = 0.001;
  c.estimators = {EstimatorKind::ls_ff, EstimatorKind::fct, EstimatorKind::ls_standard,
                  EstimatorKind::gradient};
  return c;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::ls_ff:
      return "ls_ff";
    case EstimatorKind::ls_standard:
      return "ls_standard";
    case EstimatorKind::gradient:
      return "gradient";
    case EstimatorKind::fct:
      return "fct";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(std::string_view text) {
  for (EstimatorKind k : kCanonicalOrder) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown estimator '" + std::string(text) +
                    "' (expected ls_ff, fct, ls_standard or gradient)");
}

bool ScenarioConfig::has(EstimatorKind kind) const {
  return std::find(estimators.begin(), estimators.end(), kind) != estimators.end();
}

void ScenarioConfig::validate() const {
  plant.validate();
  integration.validate();
  if (theta_hat0.size() != plant.theta_true.size()) {
    throw ConfigError("theta_hat0 must have the same dimension as plant.theta_true");
  }
  if (!theta_hat0.allFinite()) {
    throw ConfigError("theta_hat0 must be finite");
  }
  if (!(delta_fct > 0.0)) throw ConfigError("delta_fct must be positive");
  if (!(rho_threshold > 0.0)) throw ConfigError("rho_threshold must be positive");
  if (!(gradient_gamma > 0.0)) throw ConfigError("gains.gamma_gradient must be positive");
  if (estimators.empty()) throw ConfigError("at least one estimator must be selected");
  if (has(EstimatorKind::fct) && !has(EstimatorKind::ls_ff)) {
    throw ConfigError("estimator fct requires ls_ff");
  }
}

std::vector<std::string> preset_names() {
  return {"example5", "example5-noise", "zero-input"};
}

bool is_preset(std::string_view name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ScenarioConfig preset(std::string_view name) {
  if (name == "example5") return example5();
  if (name == "example5-noise") {
    ScenarioConfig c = example5();
    c.name = "example5-noise";
    c.plant.noise = NoiseConfig{true, 0.01, 1};
    return c;
  }
  if (name == "zero-input") {
    ScenarioConfig c = example5();
    c.name = "zero-input";
    c.plant.input.level = 0.0;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

ScenarioConfig parse_config_text(std::string_view text, std::string_view source) {
  std::map<std::string, Entry> entries;
  const auto& keys = known_keys();
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    std::ostringstream where;
    where << source << ":" << line_no << ": ";
    if (eq == std::string_view::npos) {
      throw ConfigError(where.str() + "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where.str() + "unknown key '" + key + "'");
    }
    if (entries.count(key)) {
      throw ConfigError(where.str() + "duplicate key '" + key + "'");
    }
    entries.emplace(key, Entry{value, line_no});
  }

  const Reader r(source, std::move(entries));
  ScenarioConfig c;
  bool have_theta = false;
  if (const Entry* p = r.find("preset")) {
    if (!is_preset(p->value)) r.fail("preset", "unknown preset '" + p->value + "'");
    c = preset(p->value);
    have_theta = true;
  } else {
    c.estimators = {EstimatorKind::ls_ff, EstimatorKind::fct};
  }

  r.text("name", c.name);

  have_theta = r.vector("plant.theta_true", c.plant.theta_true) || have_theta;
  if (!have_theta) {
    std::ostringstream os;
    os << source << ": key 'plant.theta_true' is required (no default)";
    throw ConfigError(os.str());
  }
  r.real("plant.lambda", c.plant.lambda);
  if (const Entry* e = r.find("plant.input")) {
    c.plant.input.kind = r.guarded("plant.input", [&] { return parse_input_kind(e->value); });
  }
  r.real("plant.input_level", c.plant.input.level);
  r.real("plant.input_amplitude", c.plant.input.amplitude);
  r.real("plant.input_frequency", c.plant.input.frequency);

  r.boolean("noise.enabled", c.plant.noise.enabled);
  r.real("noise.std_dev", c.plant.noise.std_dev);
  r.unsigned64("noise.seed", c.plant.noise.seed);

  double gamma_F = c.gains.gamma_F();
  double f0 = c.gains.f0();
  double chi0 = c.gains.chi0();
  double k = c.gains.k();
  MatrixNorm norm = c.gains.norm();
  r.real("gains.gamma_F", gamma_F);
  r.real("gains.f0", f0);
  r.real("gains.chi0", chi0);
  r.real("gains.k", k);
  if (const Entry* e = r.find("gains.norm")) {
    norm = r.guarded("gains.norm", [&] { return parse_matrix_norm(e->value); });
  }
  c.gains = r.guarded("gains.k", [&] { return LsGains(gamma_F, f0, chi0, k, norm); });
  r.real("gains.gamma_gradient", c.gradient_gamma);

  r.vector("theta_hat0", c.theta_hat0);
  r.real("delta_fct", c.delta_fct);
  r.real("rho_threshold", c.rho_threshold);

  r.real("integration.step", c.integration.step);
  r.real("integration.t_end", c.integration.t_end);
  if (const Entry* e = r.find("integration.method")) {
    c.integration.method = r.guarded("integration.method", [&] { return parse_method(e->value); });
  }

  if (const Entry* e = r.find("estimators")) {
    std::vector<EstimatorKind> picked;
    for (auto part : split_list(e->value)) {
      if (part.empty()) continue;
      picked.push_back(r.guarded("estimators", [&] { return parse_estimator_kind(part); }));
    }
    c.estimators.clear();
    for (EstimatorKind kind : kCanonicalOrder) {
      if (std::find(picked.begin(), picked.end(), kind) != picked.end()) c.estimators.push_back(kind);
    }
  }

  r.text("outputs.trace", c.outputs.trace);
  r.text("outputs.estimators_trace", c.outputs.estimators_trace);
  r.text("outputs.summary", c.outputs.summary);
  r.text("outputs.plots_dir", c.outputs.plots_dir);

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return c;
}

ScenarioConfig parse_config(const std::string& path_or_preset) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(path_or_preset, ec)) {
    if (is_preset(path_or_preset)) {
      ScenarioConfig c = preset(path_or_preset);
      c.validate();
      return c;
    }
    throw ConfigError("configuration file '" + path_or_preset +
                      "' does not exist and is not a preset name");
  }
  std::ifstream in(path_or_preset);
  if (!in) {
    throw ConfigError("cannot read configuration file '" + path_or_preset + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path_or_preset);
}

std::string to_config_text(const ScenarioConfig& c) {
  auto list = [](const Vector& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += format_double(v[i]);
    }
    return s;
  };
  std::ostringstream os;
  os << "name = " << c.name << "\n";
  os << "plant.theta_true = " << list(c.plant.theta_true) << "\n";
  os << "plant.lambda = " << format_double(c.plant.lambda) << "\n";
  os << "plant.input = " << to_string(c.plant.input.kind) << "\n";
  os << "plant.input_level = " << format_double(c.plant.input.level) << "\n";
  os << "plant.input_amplitude = " << format_double(c.plant.input.amplitude) << "\n";
  os << "plant.input_frequency = " << format_double(c.plant.input.frequency) << "\n";
  os << "noise.enabled = " << (c.plant.noise.enabled ? "true" : "false") << "\n";
  os << "noise.std_dev = " << format_double(c.plant.noise.std_dev) << "\n";
  os << "noise.seed = " << c.plant.noise.seed << "\n";
  os << "gains.gamma_F = " << format_double(c.gains.gamma_F()) << "\n";
  os << "gains.f0 = " << format_double(c.gains.f0()) << "\n";
  os << "gains.chi0 = " << format_double(c.gains.chi0()) << "\n";
  os << "gains.k = " << format_double(c.gains.k()) << "\n";
  os << "gains.norm = " << to_string(c.gains.norm()) << "\n";
  os << "gains.gamma_gradient = " << format_double(c.gradient_gamma) << "\n";
  os << "theta_hat0 = " << list(c.theta_hat0) << "\n";
  os << "delta_fct = " << format_double(c.delta_fct) << "\n";
  os << "rho_threshold = " << format_double(c.rho_threshold) << "\n";
  os << "integration.step = " << format_double(c.integration.step) << "\n";
  os << "integration.t_end = " << format_double(c.integration.t_end) << "\n";
  os << "integration.method = " << to_string(c.integration.method) << "\n";
  os << "estimators = ";
  for (std::size_t i = 0; i < c.estimators.size(); ++i) {
    os << (i ? ", " : "") << to_string(c.estimators[i]);
  }
  os << "\n";
  // Output paths are not part of the scenario itself and are omitted.
  return os.str();
}

}  // namespace lsfct
