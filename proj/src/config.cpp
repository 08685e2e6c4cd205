#include "bifluid/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "bifluid/expression.hpp"

namespace bifluid {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::ValidationError, key + ": " + what);
}

double to_number(const std::string& key, const std::string& v) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double d = std::strtod(begin, &end);
  if (v.empty() || end != begin + v.size()) invalid(key, "expected a number, got '" + v + "'");
  if (!std::isfinite(d)) invalid(key, "value must be finite");
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_number(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) invalid(key, "expected an integer, got '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  invalid(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') quoted = !quoted;
    else if (line[k] == '#' && !quoted) return line.substr(0, k);
  }
  return line;
}

std::string quote(const std::string& v) { return "\"" + v + "\""; }

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ", ";
    if constexpr (std::is_same_v<T, int>) out += std::to_string(values[k]);
    else out += format_number(values[k]);
  }
  return out;
}

struct Key {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Ref>
Key real_key(std::string section, std::string name, Ref ref) {
  const std::string key = name;
  return {std::move(section), std::move(name),
          [ref, key](RunConfig& c, const std::string& v) { ref(c) = to_number(key, v); },
          [ref](const RunConfig& c) { return format_number(ref(const_cast<RunConfig&>(c))); }};
}

template <typename Ref>
Key int_key(std::string section, std::string name, Ref ref) {
  const std::string key = name;
  return {std::move(section), std::move(name),
          [ref, key](RunConfig& c, const std::string& v) { ref(c) = to_int(key, v); },
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

template <typename Ref>
Key bool_key(std::string section, std::string name, Ref ref) {
  const std::string key = name;
  return {std::move(section), std::move(name),
          [ref, key](RunConfig& c, const std::string& v) { ref(c) = to_bool(key, v); },
          [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <typename Ref>
Key string_key(std::string section, std::string name, Ref ref) {
  return {std::move(section), std::move(name),
          [ref](RunConfig& c, const std::string& v) { ref(c) = unquote(v); },
          [ref](const RunConfig& c) { return quote(ref(const_cast<RunConfig&>(c))); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(real_key("params", "a", [](RunConfig& c) -> double& { return c.params.a; }));
    for (int i = 0; i < 2; ++i) {
      const std::string s = std::to_string(i + 1);
      k.push_back(real_key("params", "K" + s, [i](RunConfig& c) -> double& { return c.params.K[i]; }));
      k.push_back(real_key("params", "gamma" + s, [i](RunConfig& c) -> double& { return c.params.gamma[i]; }));
    }
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        k.push_back(real_key("params", "mu" + std::to_string(i + 1) + std::to_string(j + 1),
                             [i, j](RunConfig& c) -> double& { return c.params.mu[i][j]; }));
      }
    }
    k.push_back(bool_key("params", "triangular_enforced",
                         [](RunConfig& c) -> bool& { return c.params.triangular_enforced; }));

    k.push_back(int_key("grid", "n", [](RunConfig& c) -> int& { return c.n; }));

    k.push_back(real_key("control", "cfl_safety", [](RunConfig& c) -> double& { return c.control.cfl_safety; }));
    k.push_back(real_key("control", "dt_max", [](RunConfig& c) -> double& { return c.control.dt_max; }));
    k.push_back(real_key("control", "t_end", [](RunConfig& c) -> double& { return c.control.t_end; }));
    k.push_back(real_key("control", "fixed_dt", [](RunConfig& c) -> double& { return c.control.fixed_dt; }));
    k.push_back(bool_key("control", "drag_implicit",
                         [](RunConfig& c) -> bool& { return c.control.scheme.drag_implicit; }));
    k.push_back(real_key("control", "density_floor",
                         [](RunConfig& c) -> double& { return c.control.scheme.density_floor; }));
    k.push_back({"control", "convection",
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = unquote(v);
                   if (s == "upwind") c.control.scheme.convection = Convection::Upwind;
                   else if (s == "central") c.control.scheme.convection = Convection::Central;
                   else invalid("convection", "expected upwind or central, got '" + s + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.control.scheme.convection == Convection::Upwind ? "upwind" : "central");
                 }});
    k.push_back({"control", "viscous_solve",
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = unquote(v);
                   if (s == "automatic") c.control.scheme.viscous = ViscousSolve::Automatic;
                   else if (s == "sequential") c.control.scheme.viscous = ViscousSolve::Sequential;
                   else if (s == "block") c.control.scheme.viscous = ViscousSolve::Block;
                   else invalid("viscous_solve", "expected automatic, sequential or block, got '" + s + "'");
                 },
                 [](const RunConfig& c) {
                   switch (c.control.scheme.viscous) {
                     case ViscousSolve::Sequential: return std::string("sequential");
                     case ViscousSolve::Block: return std::string("block");
                     default: return std::string("automatic");
                   }
                 }});

    k.push_back(string_key("initial", "preset", [](RunConfig& c) -> std::string& { return c.initial.preset; }));
    for (int i = 0; i < 2; ++i) {
      const std::string s = std::to_string(i + 1);
      k.push_back(string_key("initial", "rho0" + s, [i](RunConfig& c) -> std::string& { return c.initial.rho0[i]; }));
      k.push_back(string_key("initial", "u0" + s, [i](RunConfig& c) -> std::string& { return c.initial.u0[i]; }));
    }

    k.push_back(bool_key("monitors", "energy", [](RunConfig& c) -> bool& { return c.monitors.energy; }));
    k.push_back(bool_key("monitors", "velocity", [](RunConfig& c) -> bool& { return c.monitors.velocity; }));
    k.push_back(bool_key("monitors", "density", [](RunConfig& c) -> bool& { return c.monitors.density; }));
    k.push_back(bool_key("monitors", "definition1", [](RunConfig& c) -> bool& { return c.monitors.definition1; }));
    k.push_back(bool_key("monitors", "lagrangian", [](RunConfig& c) -> bool& { return c.monitors.lagrangian; }));
    k.push_back(real_key("monitors", "tol_scale", [](RunConfig& c) -> double& { return c.monitors.tol_scale; }));
    k.push_back(real_key("monitors", "lagrangian_constant",
                         [](RunConfig& c) -> double& { return c.monitors.lagrangian_constant; }));

    k.push_back({"output", "stride",
                 [](RunConfig& c, const std::string& v) {
                   if (unquote(v) == "auto") c.stride.reset();
                   else c.stride = to_int("stride", v);
                 },
                 [](const RunConfig& c) { return c.stride ? std::to_string(*c.stride) : std::string("auto"); }});
    k.push_back({"output", "seed",
                 [](RunConfig& c, const std::string& v) {
                   const char* begin = v.c_str();
                   char* end = nullptr;
                   const unsigned long long s = std::strtoull(begin, &end, 10);
                   if (v.empty() || v[0] == '-' || end != begin + v.size()) invalid("seed", "expected a non-negative integer");
                   c.seed = s;
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    k.push_back(string_key("output", "directory", [](RunConfig& c) -> std::string& { return c.directory; }));

    k.push_back({"mms", "resolutions",
                 [](RunConfig& c, const std::string& v) {
                   c.mms.resolutions.clear();
                   for (const auto& item : split_list(v)) c.mms.resolutions.push_back(to_int("resolutions", item));
                 },
                 [](const RunConfig& c) { return join(c.mms.resolutions); }});
    k.push_back(real_key("mms", "dt_factor", [](RunConfig& c) -> double& { return c.mms.dt_factor; }));
    k.push_back(real_key("mms", "min_order", [](RunConfig& c) -> double& { return c.mms.min_order; }));

    k.push_back({"uniqueness", "eps",
                 [](RunConfig& c, const std::string& v) {
                   c.uniqueness.eps.clear();
                   for (const auto& item : split_list(v)) c.uniqueness.eps.push_back(to_number("eps", item));
                 },
                 [](const RunConfig& c) { return join(c.uniqueness.eps); }});
    k.push_back(real_key("uniqueness", "max_spread", [](RunConfig& c) -> double& { return c.uniqueness.max_spread; }));
    k.push_back(real_key("uniqueness", "gronwall_scale",
                         [](RunConfig& c) -> double& { return c.uniqueness.gronwall_scale; }));
    k.push_back(string_key("uniqueness", "delta", [](RunConfig& c) -> std::string& { return c.uniqueness.delta; }));
    for (int i = 0; i < 2; ++i) {
      const std::string s = std::to_string(i + 1);
      k.push_back(string_key("uniqueness", "delta_rho0" + s,
                             [i](RunConfig& c) -> std::string& { return c.uniqueness.delta_rho0[i]; }));
      k.push_back(string_key("uniqueness", "delta_u0" + s,
                             [i](RunConfig& c) -> std::string& { return c.uniqueness.delta_u0[i]; }));
    }

    k.push_back({"galerkin", "modes",
                 [](RunConfig& c, const std::string& v) {
                   c.galerkin.modes.clear();
                   for (const auto& item : split_list(v)) c.galerkin.modes.push_back(to_int("modes", item));
                 },
                 [](const RunConfig& c) { return join(c.galerkin.modes); }});
    k.push_back({"galerkin", "cells",
                 [](RunConfig& c, const std::string& v) {
                   c.galerkin.cells.clear();
                   for (const auto& item : split_list(v)) c.galerkin.cells.push_back(to_int("cells", item));
                 },
                 [](const RunConfig& c) { return join(c.galerkin.cells); }});
    k.push_back(real_key("galerkin", "horizon", [](RunConfig& c) -> double& { return c.galerkin.horizon; }));
    k.push_back(real_key("galerkin", "heat_tol", [](RunConfig& c) -> double& { return c.galerkin.heat_tol; }));
    k.push_back(real_key("galerkin", "ode_tol", [](RunConfig& c) -> double& { return c.galerkin.ode_tol; }));
    return k;
  }();
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

bool known_section(const std::string& s) {
  for (const auto& k : keys()) {
    if (k.section == s) return true;
  }
  return false;
}

struct PresetEntry {
  const char* name;
  InitialSpec spec;
};

const std::vector<PresetEntry>& presets() {
  static const std::vector<PresetEntry> table = {
      {"equilibrium", {"equilibrium", {"1", "1"}, {"0", "0"}}},
      {"smooth", {"smooth", {"1 + 0.5*sin(2*pi*x)", "1 + 0.25*cos(pi*x)"}, {"0.5*sin(pi*x)", "-0.3*sin(2*pi*x)"}}},
      {"acoustic", {"acoustic", {"1", "1"}, {"0.01*sin(pi*x)", "0"}}},
      {"counterflow", {"counterflow", {"1", "1"}, {"sin(pi*x)", "-sin(pi*x)"}}},
      {"vacuum", {"vacuum", {"1.5e-12 + 10*x^2", "1"}, {"10*sin(pi*x)", "0"}}},
  };
  return table;
}

Profile compile(const std::string& key, const std::string& text) {
  Expression e = [&] {
    try {
      return Expression::parse(text);
    } catch (const Error& err) {
      throw Error(ErrorCode::ParseError, key + ": " + err.what());
    }
  }();
  for (int k = 0; k <= 1000; ++k) {
    if (!std::isfinite(e(k / 1000.0))) invalid(key, "expression is not finite on [0,1]");
  }
  return [e](double x) { return e(x); };
}

void validate(RunConfig& c) {
  if (c.n < 4) invalid("n", "grid needs at least 4 cells");
  if (!(c.control.cfl_safety > 0.0 && c.control.cfl_safety <= 1.0)) invalid("cfl_safety", "must lie in (0, 1]");
  if (!(c.control.dt_max > 0.0)) invalid("dt_max", "must be positive");
  if (!(c.control.t_end > 0.0)) invalid("t_end", "must be positive");
  if (c.control.fixed_dt < 0.0) invalid("fixed_dt", "must be non-negative");
  if (c.control.scheme.density_floor < 0.0) invalid("density_floor", "must be non-negative");
  if (c.stride && *c.stride < 1) invalid("stride", "must be at least 1");
  if (!(c.monitors.tol_scale > 0.0)) invalid("tol_scale", "must be positive");
  if (!(c.monitors.lagrangian_constant > 0.0)) invalid("lagrangian_constant", "must be positive");
  if (c.mms.resolutions.size() < 2) invalid("resolutions", "need at least 2 resolutions");
  for (int r : c.mms.resolutions) {
    if (r < 4) invalid("resolutions", "each resolution needs at least 4 cells");
  }
  if (!(c.mms.dt_factor > 0.0)) invalid("dt_factor", "must be positive");
  if (c.uniqueness.eps.empty()) invalid("eps", "need at least one value");
  for (double e : c.uniqueness.eps) {
    if (e < 0.0) invalid("eps", "values must be non-negative");
  }
  if (!(c.uniqueness.max_spread >= 1.0)) invalid("max_spread", "must be at least 1");
  if (!(c.uniqueness.gronwall_scale > 0.0)) invalid("gronwall_scale", "must be positive");
  if (c.uniqueness.delta != "expression" && c.uniqueness.delta != "random") {
    invalid("delta", "expected expression or random");
  }
  if (c.galerkin.modes.empty() || c.galerkin.modes.size() != c.galerkin.cells.size()) {
    invalid("modes", "modes and cells must be non-empty lists of equal length");
  }
  for (int m : c.galerkin.modes) {
    if (m < 1) invalid("modes", "each entry must be at least 1");
  }
  for (int m : c.galerkin.cells) {
    if (m < 4) invalid("cells", "each entry needs at least 4 cells");
  }
  if (!(c.galerkin.horizon > 0.0)) invalid("horizon", "must be positive");
  if (!(c.galerkin.heat_tol > 0.0)) invalid("heat_tol", "must be positive");
  if (!(c.galerkin.ode_tol > 0.0)) invalid("ode_tol", "must be positive");

  try {
    c.params = validate_params(c.params);
  } catch (const Error& e) {
    std::string key;
    switch (e.code()) {
      case ErrorCode::DragNotPositive: key = "a"; break;
      case ErrorCode::PressureCoefficientNotPositive: key = c.params.K[0] > 0.0 ? "K2" : "K1"; break;
      case ErrorCode::AdiabaticExponentTooSmall: key = c.params.gamma[0] > 1.0 ? "gamma2" : "gamma1"; break;
      case ErrorCode::ValidationError: key = "mu12"; break;
      default: key = "mu11, mu12, mu21, mu22"; break;
    }
    throw Error(e.code(), key + ": " + e.what());
  }

  // Preset entries fill whatever the file left unset.
  if (!c.initial.preset.empty()) {
    const InitialSpec p = preset(c.initial.preset);
    for (int i = 0; i < 2; ++i) {
      if (c.initial.rho0[i].empty()) c.initial.rho0[i] = p.rho0[i];
      if (c.initial.u0[i].empty()) c.initial.u0[i] = p.u0[i];
    }
  }
  for (int i = 0; i < 2; ++i) {
    const std::string s = std::to_string(i + 1);
    if (c.initial.rho0[i].empty()) invalid("rho0" + s, "missing (set it or choose a preset)");
    if (c.initial.u0[i].empty()) invalid("u0" + s, "missing (set it or choose a preset)");
  }
  build_initial(c.initial);
  build_perturbation(c.uniqueness, c.seed);
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.emplace_back(p.name);
  return out;
}

InitialSpec preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (name == p.name) return p.spec;
  }
  std::string known;
  for (const auto& p : presets()) known += std::string(known.empty() ? "" : ", ") + p.name;
  invalid("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::ParseError, where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) throw Error(ErrorCode::ParseError, where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, where + "expected 'key = value'");
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Key* key = find_key(name);
    if (!key) throw Error(ErrorCode::ParseError, where + "unknown key '" + name + "'");
    if (!section.empty() && key->section != section) {
      throw Error(ErrorCode::ParseError,
                  where + "key '" + name + "' belongs to [" + key->section + "], not [" + section + "]");
    }
    if (auto it = seen.find(name); it != seen.end()) {
      throw Error(ErrorCode::ParseError,
                  where + "duplicate key '" + name + "' (first set on line " + std::to_string(it->second) + ")");
    }
    seen[name] = lineno;
    if (value.size() >= 1 && value.front() == '"' && (value.size() < 2 || value.back() != '"')) {
      throw Error(ErrorCode::ParseError, where + "unterminated string for '" + name + "'");
    }
    try {
      key->set(c, value);
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string write_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + k.get(config) + "\n";
  }
  return out;
}

InitialData build_initial(const InitialSpec& spec) {
  InitialData d;
  for (int i = 0; i < 2; ++i) {
    const std::string s = std::to_string(i + 1);
    d.rho0[i] = compile("rho0" + s, spec.rho0[i]);
    d.u0[i] = compile("u0" + s, spec.u0[i]);
  }
  return d;
}

InitialData build_perturbation(const UniquenessBlock& block, std::uint64_t seed) {
  if (block.delta == "random") {
    // Raw engine output keeps the draw identical across standard libraries.
    std::mt19937_64 engine(seed);
    auto uniform = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    InitialData d;
    for (int i = 0; i < 2; ++i) {
      std::array<double, 4> c{};
      for (int k = 0; k < 4; ++k) c[k] = uniform() / ((k + 1) * (k + 1));
      d.u0[i] = [c](double x) {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += c[k] * std::sin((k + 1) * std::numbers::pi * x);
        return v;
      };
      d.rho0[i] = [](double) { return 0.0; };
    }
    return d;
  }
  InitialData d;
  for (int i = 0; i < 2; ++i) {
    const std::string s = std::to_string(i + 1);
    d.rho0[i] = compile("delta_rho0" + s, block.delta_rho0[i]);
    d.u0[i] = compile("delta_u0" + s, block.delta_u0[i]);
  }
  return d;
}

}  // namespace bifluid
