#pragma once

// Run configuration. Files use a TOML subset: [section] headers, `key = value`
// lines and '#' comments. Values are numbers (including inf/-inf), quoted
// strings, booleans and flat arrays of numbers.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "finco/diagnostics.hpp"
#include "finco/errors.hpp"
#include "finco/pipeline.hpp"
#include "finco/reference_qm.hpp"

namespace finco {

namespace toml {

using Value = std::variant<bool, double, std::string, std::vector<double>>;
using Table = std::map<std::string, Value>;  // full dotted key -> value

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  // shortest text that reads back to the same double
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") { out = std::numeric_limits<double>::infinity(); return true; }
  if (t == "-inf") { out = -std::numeric_limits<double>::infinity(); return true; }
  if (t.empty()) return false;
  std::string digits;
  for (char c : t)
    if (c != '_') digits += c;
  const char* first = digits.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), out);
  return ec == std::errc() && ptr == digits.data() + digits.size();
}

inline Value parse_value(const std::string& raw, const std::string& key) {
  const std::string t = trim(raw);
  if (t.empty()) throw ConfigError(key, "missing value");
  if (t == "true") return true;
  if (t == "false") return false;
  if (t.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < t.size() && t[i] != '"'; ++i) {
      if (t[i] == '\\' && i + 1 < t.size()) {
        const char e = t[++i];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += t[i];
      }
    }
    if (i >= t.size() || trim(t.substr(i + 1)) != "") throw ConfigError(key, "unterminated string");
    return out;
  }
  if (t.front() == '[') {
    if (t.back() != ']') throw ConfigError(key, "unterminated array");
    std::vector<double> out;
    const std::string body = trim(t.substr(1, t.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty() && ss.eof()) break;  // trailing comma
      double v = 0.0;
      if (!parse_number(item, v)) throw ConfigError(key, "array items must be numbers, got '" + trim(item) + "'");
      out.push_back(v);
    }
    return out;
  }
  double v = 0.0;
  if (!parse_number(t, v)) throw ConfigError(key, "cannot parse value '" + t + "'");
  return v;
}

/// Strips a trailing comment that is not inside a string.
inline std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_str) { ++i; continue; }
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

inline Table parse(std::istream& in) {
  Table out;
  std::string section, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    const std::string k = trim(t.substr(0, eq));
    if (k.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? k : section + "." + k;
    if (out.count(full)) throw ConfigError(full, "duplicate key");
    out[full] = parse_value(t.substr(eq + 1), full);
  }
  return out;
}

inline Table parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

inline std::string format(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) {
    std::string out = "\"";
    for (char c : *s) {
      if (c == '"' || c == '\\') out += '\\';
      if (c == '\n') { out += "\\n"; continue; }
      out += c;
    }
    return out + "\"";
  }
  const auto& a = std::get<std::vector<double>>(v);
  std::string out = "[";
  for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + format_number(a[i]);
  return out + "]";
}

/// Grouped by section in key order; keys without a dot come first.
inline std::string write(const Table& t) {
  std::map<std::string, std::vector<std::pair<std::string, const Value*>>> sections;
  for (const auto& [k, v] : t) {
    const auto dot = k.rfind('.');
    if (dot == std::string::npos) sections[""].push_back({k, &v});
    else sections[k.substr(0, dot)].push_back({k.substr(dot + 1), &v});
  }
  std::string out;
  for (const auto& [name, entries] : sections) {
    if (!name.empty()) out += (out.empty() ? "" : "\n") + std::string("[") + name + "]\n";
    for (const auto& [k, v] : entries) out += k + " = " + format(*v) + "\n";
  }
  return out;
}

}  // namespace toml

enum class CheckpointUnit { ClassicalPeriods, AtomicUnits };

struct CheckpointSpec {
  CheckpointUnit unit = CheckpointUnit::ClassicalPeriods;
  std::vector<double> times{0.5, 1.0};
};

/// Portion [x_min, x_max] of the reference grid on which FINCO is evaluated.
struct WindowSpec {
  double x_min = -6.0;
  double x_max = 30.0;
};

struct RootSearchSpec {
  int seeds_nx = 12;
  int seeds_ny = 10;
  double max_step = 0.5;
  int x_stride = 16;  // every stride-th window point
};

struct DiagnosticsSpec {
  BranchOptions branch{};
  ScarOptions scar{};
};

struct RunConfig {
  std::string name = "run";
  PotentialModel model{Morse{}};
  InitialGaussian gaussian{0.5, 9.342, 0.0};
  double gamma_f = 0.5;
  PrefactorPhase phase = PrefactorPhase::Continuous;
  unsigned workers = 0;
  ContourSpec contour{};
  Rect rect{9.342 - 3.5, 9.342 + 4.5, -3.5, 3.5};
  int nx = 100;
  int ny = 200;
  RefinementSpec refinement{3, 5000};
  CheckpointSpec checkpoints{};
  FilterThresholds filters{};
  StepperOptions stepper{};
  GridSpec reference{};
  WindowSpec window{};
  DiagnosticsSpec diagnostics{};
  RootSearchSpec rootsearch{};
  std::string output_dir = "out";

  FincoSetup setup() const {
    FincoSetup s;
    s.model = model;
    s.gaussian = gaussian;
    s.gamma_f = gamma_f;
    s.contour = contour;
    s.rect = rect;
    s.nx = nx;
    s.ny = ny;
    s.refinement = refinement;
    s.filters = filters;
    s.stepper = stepper;
    s.phase = phase;
    s.workers = workers;
    return s;
  }

  /// Period of the orbit launched at the wavepacket centre; 0 for a free particle.
  double t_cl() const {
    if (model.kind() == PotentialKind::FreeParticle) return 0.0;
    return classical_period(model, gaussian.q0, gaussian.p0);
  }

  std::vector<double> checkpoint_times() const {
    std::vector<double> t = checkpoints.times;
    if (checkpoints.unit == CheckpointUnit::ClassicalPeriods) {
      const double tc = t_cl();
      for (auto& v : t) v *= tc;
    }
    return t;
  }
  double t_final() const { return checkpoint_times().back(); }

  /// Reference-grid positions inside the window.
  std::vector<double> window_positions() const {
    std::vector<double> x;
    for (double v : reference.positions())
      if (v >= window.x_min && v <= window.x_max) x.push_back(v);
    return x;
  }
};

namespace detail {

inline const char* unit_name(CheckpointUnit u) { return u == CheckpointUnit::ClassicalPeriods ? "tcl" : "au"; }
inline const char* phase_name(PrefactorPhase p) { return p == PrefactorPhase::Continuous ? "continuous" : "principal"; }
inline const char* family_name(ContourFamily f) { return f == ContourFamily::Real ? "real" : "rectangular_dip"; }
inline const char* nu_mode_name(PotentialFilterMode m) {
  return m == PotentialFilterMode::PathMinimum ? "path_minimum" : "final";
}

class Reader {
 public:
  explicit Reader(const toml::Table& t) : t_(t) {}

  double number(const std::string& key) const {
    const auto* v = std::get_if<double>(&at(key));
    if (!v) throw ConfigError(key, "expected a number");
    return *v;
  }
  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
    return v;
  }
  long long integer(const std::string& key, long long min) const {
    const double v = number(key);
    if (!std::isfinite(v) || v != std::floor(v)) throw ConfigError(key, "expected an integer");
    if (v < static_cast<double>(min)) throw ConfigError(key, "must be >= " + std::to_string(min));
    return static_cast<long long>(v);
  }
  std::string string(const std::string& key) const {
    const auto* v = std::get_if<std::string>(&at(key));
    if (!v) throw ConfigError(key, "expected a string");
    return *v;
  }
  std::vector<double> array(const std::string& key) const {
    const auto* v = std::get_if<std::vector<double>>(&at(key));
    if (!v) throw ConfigError(key, "expected an array of numbers");
    return *v;
  }
  template <class E>
  E choice(const std::string& key, std::initializer_list<std::pair<const char*, E>> options) const {
    const std::string s = string(key);
    std::string names;
    for (const auto& [n, e] : options) {
      if (s == n) return e;
      names += std::string(names.empty() ? "" : ", ") + n;
    }
    throw ConfigError(key, "unknown value '" + s + "' (expected one of: " + names + ")");
  }

 private:
  const toml::Value& at(const std::string& key) const {
    const auto it = t_.find(key);
    if (it == t_.end()) throw ConfigError(key, "missing key");
    return it->second;
  }
  const toml::Table& t_;
};

}  // namespace detail

/// Every configuration key with its value. Keys that do not apply to the
/// chosen potential are still written so that the schema is fixed.
inline toml::Table to_table(const RunConfig& c) {
  toml::Table t;
  t["run.name"] = c.name;
  t["run.workers"] = static_cast<double>(c.workers);
  t["output.dir"] = c.output_dir;

  Morse morse{};
  Harmonic harm{};
  if (const auto* m = std::get_if<Morse>(&c.model.params())) morse = *m;
  if (const auto* h = std::get_if<Harmonic>(&c.model.params())) harm = *h;
  t["potential.kind"] = to_string(c.model.kind());
  t["potential.depth"] = morse.depth;
  t["potential.beta"] = morse.beta;
  t["potential.omega"] = harm.omega;

  t["initial.gamma0"] = c.gaussian.gamma0;
  t["initial.q0"] = c.gaussian.q0;
  t["initial.p0"] = c.gaussian.p0;

  t["finco.gamma_f"] = c.gamma_f;
  t["finco.phase"] = std::string(detail::phase_name(c.phase));

  t["contour.family"] = std::string(detail::family_name(c.contour.family));
  t["contour.depth"] = c.contour.depth;
  t["contour.dip_start"] = c.contour.span.start;
  t["contour.dip_end"] = c.contour.span.end;

  t["manifold.re_min"] = c.rect.re_min;
  t["manifold.re_max"] = c.rect.re_max;
  t["manifold.im_min"] = c.rect.im_min;
  t["manifold.im_max"] = c.rect.im_max;
  t["manifold.nx"] = static_cast<double>(c.nx);
  t["manifold.ny"] = static_cast<double>(c.ny);
  t["manifold.refine_rounds"] = static_cast<double>(c.refinement.rounds);
  t["manifold.refine_budget"] = static_cast<double>(c.refinement.budget);

  t["checkpoints.unit"] = std::string(detail::unit_name(c.checkpoints.unit));
  t["checkpoints.times"] = c.checkpoints.times;

  t["filters.sigma"] = c.filters.sigma;
  t["filters.nu"] = c.filters.nu;
  t["filters.eps"] = c.filters.eps;
  t["filters.nu_mode"] = std::string(detail::nu_mode_name(c.filters.nu_mode));

  t["stepper.dt_max"] = c.stepper.dt_max;
  t["stepper.abs_tol"] = c.stepper.abs_tol;
  t["stepper.rel_tol"] = c.stepper.rel_tol;
  t["stepper.dt_min"] = c.stepper.dt_min;
  t["stepper.max_steps"] = static_cast<double>(c.stepper.max_steps);

  t["reference.x_min"] = c.reference.x_min;
  t["reference.x_max"] = c.reference.x_max;
  t["reference.n"] = static_cast<double>(c.reference.n);
  t["reference.dt"] = c.reference.dt;

  t["window.x_min"] = c.window.x_min;
  t["window.x_max"] = c.window.x_max;

  t["diagnostics.branch_threshold"] = c.diagnostics.branch.threshold;
  t["diagnostics.branch_min_size"] = static_cast<double>(c.diagnostics.branch.min_size);
  t["diagnostics.scar_threshold"] = c.diagnostics.scar.threshold;
  t["diagnostics.scar_min_magnitude"] = c.diagnostics.scar.min_magnitude;

  t["rootsearch.seeds_nx"] = static_cast<double>(c.rootsearch.seeds_nx);
  t["rootsearch.seeds_ny"] = static_cast<double>(c.rootsearch.seeds_ny);
  t["rootsearch.max_step"] = c.rootsearch.max_step;
  t["rootsearch.x_stride"] = static_cast<double>(c.rootsearch.x_stride);
  return t;
}

/// Builds and validates a config from a complete table.
inline RunConfig from_table(const toml::Table& t) {
  const RunConfig defaults;
  const auto known = to_table(defaults);
  for (const auto& [k, v] : t)
    if (!known.count(k)) throw ConfigError(k, "unknown key");

  const detail::Reader r(t);
  RunConfig c;
  c.name = r.string("run.name");
  c.workers = static_cast<unsigned>(r.integer("run.workers", 0));
  c.output_dir = r.string("output.dir");
  if (c.output_dir.empty()) throw ConfigError("output.dir", "must not be empty");

  const auto kind = r.choice<PotentialKind>(
      "potential.kind",
      {{"morse", PotentialKind::Morse}, {"harmonic", PotentialKind::Harmonic}, {"free", PotentialKind::FreeParticle}});
  if (kind == PotentialKind::Morse) {
    c.model = PotentialModel{Morse{r.positive("potential.depth"), r.positive("potential.beta")}};
  } else if (kind == PotentialKind::Harmonic) {
    c.model = PotentialModel{Harmonic{r.positive("potential.omega")}};
  } else {
    c.model = PotentialModel{FreeParticle{}};
  }
  // inactive parameters still have to be well formed
  for (const char* k : {"potential.depth", "potential.beta", "potential.omega"}) r.number(k);

  c.gaussian.gamma0 = r.positive("initial.gamma0");
  c.gaussian.q0 = r.number("initial.q0");
  c.gaussian.p0 = r.number("initial.p0");
  if (!std::isfinite(c.gaussian.q0)) throw ConfigError("initial.q0", "must be finite");
  if (!std::isfinite(c.gaussian.p0)) throw ConfigError("initial.p0", "must be finite");

  c.gamma_f = r.positive("finco.gamma_f");
  if (!std::isfinite(c.gamma_f)) throw ConfigError("finco.gamma_f", "must be finite");
  c.phase = r.choice<PrefactorPhase>("finco.phase",
                                     {{"continuous", PrefactorPhase::Continuous}, {"principal", PrefactorPhase::Principal}});

  c.contour.family = r.choice<ContourFamily>(
      "contour.family", {{"real", ContourFamily::Real}, {"rectangular_dip", ContourFamily::RectangularDip}});
  c.contour.depth = r.number("contour.depth");
  if (!(c.contour.depth >= 0.0) || !std::isfinite(c.contour.depth)) throw ConfigError("contour.depth", "must be finite and >= 0");
  c.contour.span = {r.number("contour.dip_start"), r.number("contour.dip_end")};
  if (!(c.contour.span.start >= 0.0)) throw ConfigError("contour.dip_start", "must be >= 0");
  if (!(c.contour.span.end <= 1.0)) throw ConfigError("contour.dip_end", "must be <= 1");
  if (!(c.contour.span.start < c.contour.span.end)) throw ConfigError("contour.dip_end", "must exceed contour.dip_start");

  c.rect = {r.number("manifold.re_min"), r.number("manifold.re_max"), r.number("manifold.im_min"),
            r.number("manifold.im_max")};
  for (const char* k : {"manifold.re_min", "manifold.re_max", "manifold.im_min", "manifold.im_max"})
    if (!std::isfinite(r.number(k))) throw ConfigError(k, "must be finite");
  if (!(c.rect.re_max > c.rect.re_min)) throw ConfigError("manifold.re_max", "must exceed manifold.re_min");
  if (!(c.rect.im_max > c.rect.im_min)) throw ConfigError("manifold.im_max", "must exceed manifold.im_min");
  c.nx = static_cast<int>(r.integer("manifold.nx", 1));
  c.ny = static_cast<int>(r.integer("manifold.ny", 1));
  c.refinement.rounds = static_cast<int>(r.integer("manifold.refine_rounds", 0));
  c.refinement.budget = static_cast<std::size_t>(r.integer("manifold.refine_budget", 0));

  c.checkpoints.unit = r.choice<CheckpointUnit>(
      "checkpoints.unit", {{"tcl", CheckpointUnit::ClassicalPeriods}, {"au", CheckpointUnit::AtomicUnits}});
  c.checkpoints.times = r.array("checkpoints.times");
  if (c.checkpoints.times.empty()) throw ConfigError("checkpoints.times", "needs at least one time");
  for (std::size_t i = 0; i < c.checkpoints.times.size(); ++i) {
    const double v = c.checkpoints.times[i];
    if (!std::isfinite(v) || v < 0.0) throw ConfigError("checkpoints.times", "times must be finite and >= 0");
    if (i > 0 && !(v > c.checkpoints.times[i - 1])) throw ConfigError("checkpoints.times", "times must be increasing");
  }
  if (c.checkpoints.unit == CheckpointUnit::ClassicalPeriods && kind == PotentialKind::FreeParticle)
    throw ConfigError("checkpoints.unit", "a free particle has no classical period; use \"au\"");
  if (c.checkpoints.unit == CheckpointUnit::ClassicalPeriods && kind == PotentialKind::Morse) {
    try {
      (void)c.t_cl();
    } catch (const std::domain_error&) {
      throw ConfigError("checkpoints.unit", "the orbit at the wavepacket centre is not bound");
    }
  }

  c.filters.sigma = r.number("filters.sigma");
  c.filters.nu = r.number("filters.nu");
  c.filters.eps = r.positive("filters.eps");
  for (const char* k : {"filters.sigma", "filters.nu"})
    if (std::isnan(r.number(k))) throw ConfigError(k, "must not be nan");
  c.filters.nu_mode = r.choice<PotentialFilterMode>(
      "filters.nu_mode", {{"path_minimum", PotentialFilterMode::PathMinimum}, {"final", PotentialFilterMode::Final}});

  c.stepper.dt_max = r.positive("stepper.dt_max");
  c.stepper.abs_tol = r.positive("stepper.abs_tol");
  c.stepper.rel_tol = r.positive("stepper.rel_tol");
  c.stepper.dt_min = r.positive("stepper.dt_min");
  if (!(c.stepper.dt_min < c.stepper.dt_max)) throw ConfigError("stepper.dt_min", "must be below stepper.dt_max");
  c.stepper.max_steps = static_cast<std::size_t>(r.integer("stepper.max_steps", 1));

  c.reference.x_min = r.number("reference.x_min");
  c.reference.x_max = r.number("reference.x_max");
  c.reference.n = static_cast<std::size_t>(r.integer("reference.n", 2));
  c.reference.dt = r.positive("reference.dt");
  if (!(c.reference.x_max > c.reference.x_min) || !std::isfinite(c.reference.x_max - c.reference.x_min))
    throw ConfigError("reference.x_max", "must exceed reference.x_min");
  if ((c.reference.n & (c.reference.n - 1)) != 0) throw ConfigError("reference.n", "must be a power of two");
  if (!(c.gaussian.q0 > c.reference.x_min && c.gaussian.q0 < c.reference.x_max))
    throw ConfigError("initial.q0", "must lie inside the reference grid");

  c.window = {r.number("window.x_min"), r.number("window.x_max")};
  if (!(c.window.x_max > c.window.x_min)) throw ConfigError("window.x_max", "must exceed window.x_min");
  if (c.window_positions().size() < 2) throw ConfigError("window.x_min", "window holds fewer than two reference points");

  c.diagnostics.branch.threshold = r.positive("diagnostics.branch_threshold");
  c.diagnostics.branch.min_size = static_cast<std::size_t>(r.integer("diagnostics.branch_min_size", 1));
  c.diagnostics.scar.threshold = r.positive("diagnostics.scar_threshold");
  c.diagnostics.scar.min_magnitude = r.number("diagnostics.scar_min_magnitude");
  if (!(c.diagnostics.scar.min_magnitude >= 0.0)) throw ConfigError("diagnostics.scar_min_magnitude", "must be >= 0");

  c.rootsearch.seeds_nx = static_cast<int>(r.integer("rootsearch.seeds_nx", 1));
  c.rootsearch.seeds_ny = static_cast<int>(r.integer("rootsearch.seeds_ny", 1));
  c.rootsearch.max_step = r.positive("rootsearch.max_step");
  c.rootsearch.x_stride = static_cast<int>(r.integer("rootsearch.x_stride", 1));
  return c;
}

inline std::string to_toml(const RunConfig& c) { return toml::write(to_table(c)); }

inline bool operator==(const RunConfig& a, const RunConfig& b) { return to_table(a) == to_table(b); }

/// Applies `key=value` on top of a table; the key must already exist.
inline void apply_override(toml::Table& t, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("", "override '" + assignment + "' is not key=value");
  const std::string key = toml::trim(assignment.substr(0, eq));
  if (!t.count(key)) throw ConfigError(key, "unknown key");
  std::string raw = toml::trim(assignment.substr(eq + 1));
  // bare words are strings on the command line
  double dummy = 0.0;
  if (!raw.empty() && raw.front() != '"' && raw.front() != '[' && raw != "true" && raw != "false" &&
      !toml::parse_number(raw, dummy))
    raw = "\"" + raw + "\"";
  t[key] = toml::parse_value(raw, key);
}

/// Parses config text over `base`: keys not present keep the base value.
inline RunConfig parse_config(const std::string& text, const RunConfig& base = {},
                              const std::vector<std::string>& overrides = {}) {
  auto merged = to_table(base);
  for (auto& [k, v] : toml::parse(text)) {
    if (!merged.count(k)) throw ConfigError(k, "unknown key");
    merged[k] = v;
  }
  for (const auto& o : overrides) apply_override(merged, o);
  return from_table(merged);
}

inline RunConfig load_config(const std::string& path, const RunConfig& base = {},
                             const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base, overrides);
}

// ---- presets

inline RunConfig preset_morse_revival() {
  RunConfig c;
  c.name = "morse-revival";
  c.checkpoints = {CheckpointUnit::ClassicalPeriods, {0.5, 1.0, 4.0, 10.0, 19.0, 20.0}};
  // 60000 cells plus two rounds of 10000 splits: 120000 trajectories
  c.nx = 200;
  c.ny = 300;
  c.refinement = {2, 10000};
  return c;
}

inline RunConfig preset_harmonic_check() {
  RunConfig c;
  c.name = "harmonic-check";
  c.model = PotentialModel{Harmonic{1.0}};
  c.gaussian = {0.5, 1.0, 0.0};
  c.contour.family = ContourFamily::Real;
  c.rect = {-3.0, 5.0, -4.0, 4.0};
  c.nx = 100;
  c.ny = 100;
  c.refinement = {0, 0};
  c.filters = FilterThresholds::disabled();
  c.checkpoints = {CheckpointUnit::AtomicUnits, {std::numbers::pi / 2, std::numbers::pi, 2 * std::numbers::pi}};
  c.reference = {-20.0, 20.0, 1024, 0.001};
  c.window = {-6.0, 6.0};
  c.rootsearch.seeds_nx = 4;
  c.rootsearch.seeds_ny = 4;
  return c;
}

inline RunConfig preset_identity() {
  RunConfig c;
  c.name = "identity";
  c.nx = 100;
  c.ny = 100;
  c.refinement = {0, 0};
  c.checkpoints = {CheckpointUnit::ClassicalPeriods, {0.0}};
  return c;
}

inline const std::vector<std::pair<std::string, RunConfig (*)()>>& presets() {
  static const std::vector<std::pair<std::string, RunConfig (*)()>> table{
      {"morse-revival", &preset_morse_revival},
      {"harmonic-check", &preset_harmonic_check},
      {"identity", &preset_identity},
  };
  return table;
}

inline RunConfig preset(const std::string& name) {
  for (const auto& [n, f] : presets())
    if (n == name) return f();
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

}  // namespace finco
