#include "ultracoral/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ultracoral/emit.hpp"
#include "ultracoral/padic.hpp"

namespace ultracoral {

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto solver_eq = [](const SolverConfig& x, const SolverConfig& y) {
    return x.rtol == y.rtol && x.atol == y.atol && x.h_init == y.h_init &&
           x.h_min == y.h_min && x.h_max == y.h_max && x.max_steps == y.max_steps &&
           x.event_tol == y.event_tol;
  };
  auto growth_eq = [&](const GrowthConfig& x, const GrowthConfig& y) {
    return x.seed == y.seed && x.theta_delta == y.theta_delta && x.m_max == y.m_max &&
           x.omega_threshold == y.omega_threshold && x.t_max_level == y.t_max_level &&
           x.log_omega_crossings == y.log_omega_crossings && solver_eq(x.solver, y.solver);
  };
  return a.model == b.model && solver_eq(a.solver, b.solver) &&
         growth_eq(a.growth, b.growth) && a.output == b.output;
}

namespace {

struct Location {
  int line = 0;
  int column = 0;
  bool is_override = false;
};

[[noreturn]] void fail(const Location& at, const std::string& message) {
  if (at.is_override) throw ConfigError("override " + message);
  std::ostringstream os;
  os << "line " << at.line << ", column " << at.column << ": " << message;
  throw ConfigError(os.str(), at.line, at.column);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view value, const Location& at, const std::string& key) {
  value = trim(value);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    fail(at, key + ": expected a number, got '" + std::string(value) + "'");
  return out;
}

long long parse_int(std::string_view value, const Location& at, const std::string& key) {
  value = trim(value);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    fail(at, key + ": expected an integer, got '" + std::string(value) + "'");
  return out;
}

std::uint64_t parse_uint(std::string_view value, const Location& at, const std::string& key) {
  value = trim(value);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    fail(at, key + ": expected a non-negative integer, got '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view value, const Location& at, const std::string& key) {
  value = trim(value);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(at, key + ": expected true or false, got '" + std::string(value) + "'");
}

std::vector<double> parse_double_list(std::string_view value, const Location& at,
                                      const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = value.find(',', start);
    std::string_view item = value.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
    out.push_back(parse_double(item, at, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> parse_string_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = value.find(',', start);
    std::string_view item = trim(value.substr(
        start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             std::string_view value, const Location& at) {
  const std::string path = section + "." + key;
  if (section == "model") {
    if (key == "p") cfg.model.p = parse_int(value, at, path);
    else if (key == "alpha") cfg.model.alpha = parse_double(value, at, path);
    else if (key == "d") cfg.model.d = parse_double(value, at, path);
    else if (key == "eta") cfg.model.eta = parse_double(value, at, path);
    else if (key == "beta") cfg.model.beta = parse_double(value, at, path);
    else if (key == "sigma") cfg.model.sigma = parse_double(value, at, path);
    else if (key == "kappa_sp") cfg.model.kappa_sp = parse_double(value, at, path);
    else if (key == "u0") cfg.model.u0 = parse_double_list(value, at, path);
    else if (key == "v0") cfg.model.v0 = parse_double_list(value, at, path);
    else if (key == "w0") cfg.model.w0 = parse_double_list(value, at, path);
    else if (key == "allow_nonnegative_beta")
      cfg.model.allow_nonnegative_beta = parse_bool(value, at, path);
    else fail(at, "unknown key '" + path + "'");
  } else if (section == "solver") {
    if (key == "rtol") cfg.solver.rtol = parse_double(value, at, path);
    else if (key == "atol") cfg.solver.atol = parse_double(value, at, path);
    else if (key == "h_init") cfg.solver.h_init = parse_double(value, at, path);
    else if (key == "h_min") cfg.solver.h_min = parse_double(value, at, path);
    else if (key == "h_max") cfg.solver.h_max = parse_double(value, at, path);
    else if (key == "max_steps") cfg.solver.max_steps = parse_int(value, at, path);
    else if (key == "event_tol") cfg.solver.event_tol = parse_double(value, at, path);
    else fail(at, "unknown key '" + path + "'");
  } else if (section == "growth") {
    if (key == "seed") cfg.growth.seed = parse_uint(value, at, path);
    else if (key == "theta_delta") cfg.growth.theta_delta = parse_double(value, at, path);
    else if (key == "m_max") cfg.growth.m_max = static_cast<int>(parse_int(value, at, path));
    else if (key == "omega_threshold")
      cfg.growth.omega_threshold = parse_double(value, at, path);
    else if (key == "t_max_level") cfg.growth.t_max_level = parse_double(value, at, path);
    else if (key == "log_omega_crossings")
      cfg.growth.log_omega_crossings = parse_bool(value, at, path);
    else fail(at, "unknown key '" + path + "'");
  } else if (section == "output") {
    if (key == "directory") cfg.output.directory = std::string(trim(value));
    else if (key == "formats") cfg.output.formats = parse_string_list(value);
    else if (key == "svg_angle_deg")
      cfg.output.svg_angle_deg = parse_double(value, at, path);
    else if (key == "svg_length_scale")
      cfg.output.svg_length_scale = parse_double(value, at, path);
    else fail(at, "unknown key '" + path + "'");
  } else {
    fail(at, "unknown section '" + section + "'");
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;

    std::string_view line = trim(raw);
    if (!line.empty() && line.front() != '#' && line.front() != ';') {
      if (line.front() == '[') {
        if (line.back() != ']')
          fail({line_no, 1}, "section header is missing its closing ']'");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (section != "model" && section != "solver" && section != "growth" &&
            section != "output")
          fail({line_no, 1}, "unknown section '" + section + "'");
      } else {
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
          fail({line_no, 1}, "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail({line_no, 1}, "empty key");
        if (section.empty())
          fail({line_no, 1}, "key '" + key + "' appears before any [section]");
        int col = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
        set_key(cfg, section, key, value, {line_no, col});
      }
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  cfg.growth.solver = cfg.solver;
  return cfg;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) +
                      "': expected section.key=value");
  std::string_view path = trim(assignment.substr(0, eq));
  std::string_view value = trim(assignment.substr(eq + 1));
  std::size_t dot = path.find('.');
  if (dot == std::string_view::npos)
    throw ConfigError("override '" + std::string(path) +
                      "': expected a dotted section.key path");
  set_key(cfg, std::string(path.substr(0, dot)), std::string(path.substr(dot + 1)),
          value, {0, 0, true});
  cfg.growth.solver = cfg.solver;
}

void validate(const RunConfig& cfg) {
  if (!is_prime(cfg.model.p)) throw ConfigError("model.p: must be prime");
  if (!(cfg.model.alpha > 0.0)) throw ConfigError("model.alpha: must be positive");
  try {
    validate(cfg.model.kinetics(), cfg.model.allow_nonnegative_beta);
    validate(cfg.solver);
    GrowthConfig growth = cfg.growth;
    growth.solver = cfg.solver;
    validate(growth);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto check_list = [](const std::vector<double>& xs, const char* name) {
    if (xs.empty()) throw ConfigError(std::string(name) + ": needs at least one value");
    for (double x : xs) {
      if (!std::isfinite(x)) throw ConfigError(std::string(name) + ": values must be finite");
      if (x < 0.0)
        throw ConfigError(std::string(name) + ": concentrations must be non-negative");
    }
  };
  check_list(cfg.model.u0, "model.u0");
  check_list(cfg.model.v0, "model.v0");
  check_list(cfg.model.w0, "model.w0");
  std::size_t longest = std::max({cfg.model.u0.size(), cfg.model.v0.size(),
                                  cfg.model.w0.size()});
  for (const auto* pair : {&cfg.model.u0, &cfg.model.v0, &cfg.model.w0}) {
    if (pair->size() != 1 && pair->size() != longest)
      throw ConfigError("model.u0/v0/w0: lists must be scalar or share one length");
  }

  for (const std::string& fmt : cfg.output.formats) {
    if (fmt != "csv" && fmt != "json" && fmt != "svg" && fmt != "lsys")
      throw ConfigError("output.formats: unknown format '" + fmt + "'");
  }
  if (!(cfg.output.svg_angle_deg > 0.0 && cfg.output.svg_angle_deg <= 90.0))
    throw ConfigError("output.svg_angle_deg: must lie in (0, 90]");
  if (!(cfg.output.svg_length_scale > 0.0))
    throw ConfigError("output.svg_length_scale: must be positive");
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  auto list = [](const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += ",";
      out += fmt_double(xs[i]);
    }
    return out;
  };
  os << "[model]\n";
  os << "p = " << cfg.model.p << "\n";
  os << "alpha = " << fmt_double(cfg.model.alpha) << "\n";
  os << "d = " << fmt_double(cfg.model.d) << "\n";
  os << "eta = " << fmt_double(cfg.model.eta) << "\n";
  os << "beta = " << fmt_double(cfg.model.beta) << "\n";
  os << "sigma = " << fmt_double(cfg.model.sigma) << "\n";
  os << "kappa_sp = " << fmt_double(cfg.model.kappa_sp) << "\n";
  os << "u0 = " << list(cfg.model.u0) << "\n";
  os << "v0 = " << list(cfg.model.v0) << "\n";
  os << "w0 = " << list(cfg.model.w0) << "\n";
  os << "allow_nonnegative_beta = " << (cfg.model.allow_nonnegative_beta ? "true" : "false")
     << "\n";
  os << "\n[solver]\n";
  os << "rtol = " << fmt_double(cfg.solver.rtol) << "\n";
  os << "atol = " << fmt_double(cfg.solver.atol) << "\n";
  os << "h_init = " << fmt_double(cfg.solver.h_init) << "\n";
  os << "h_min = " << fmt_double(cfg.solver.h_min) << "\n";
  os << "h_max = " << fmt_double(cfg.solver.h_max) << "\n";
  os << "max_steps = " << cfg.solver.max_steps << "\n";
  os << "event_tol = " << fmt_double(cfg.solver.event_tol) << "\n";
  os << "\n[growth]\n";
  os << "seed = " << cfg.growth.seed << "\n";
  os << "theta_delta = " << fmt_double(cfg.growth.theta_delta) << "\n";
  os << "m_max = " << cfg.growth.m_max << "\n";
  os << "omega_threshold = " << fmt_double(cfg.growth.omega_threshold) << "\n";
  os << "t_max_level = " << fmt_double(cfg.growth.t_max_level) << "\n";
  os << "log_omega_crossings = " << (cfg.growth.log_omega_crossings ? "true" : "false")
     << "\n";
  os << "\n[output]\n";
  os << "directory = " << cfg.output.directory << "\n";
  {
    std::string fmts;
    for (std::size_t i = 0; i < cfg.output.formats.size(); ++i) {
      if (i) fmts += ",";
      fmts += cfg.output.formats[i];
    }
    os << "formats = " << fmts << "\n";
  }
  os << "svg_angle_deg = " << fmt_double(cfg.output.svg_angle_deg) << "\n";
  os << "svg_length_scale = " << fmt_double(cfg.output.svg_length_scale) << "\n";
  return os.str();
}

}  // namespace ultracoral
