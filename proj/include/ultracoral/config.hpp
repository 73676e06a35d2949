#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ultracoral/growth.hpp"
#include "ultracoral/integrator.hpp"
#include "ultracoral/kinetics.hpp"

namespace ultracoral {

struct ConfigError : std::runtime_error {
  int line;    // 1-based; 0 for errors outside a document (overrides, validation)
  int column;  // 1-based

  ConfigError(const std::string& message, int line_ = 0, int column_ = 0)
      : std::runtime_error(message), line(line_), column(column_) {}
};

struct ModelConfig {
  long long p = 2;
  double alpha = 2.0;
  double d = 0.1;
  double eta = 1.0;
  double beta = -0.2;
  double sigma = 1.0;
  double kappa_sp = 1.0;
  std::vector<double> u0{8.0};  // scalar or one value per branch
  std::vector<double> v0{10.0};
  std::vector<double> w0{0.0};
  bool allow_nonnegative_beta = false;

  KineticParams kinetics() const { return {d, eta, beta, sigma, kappa_sp}; }
  bool operator==(const ModelConfig&) const = default;
};

struct OutputConfig {
  std::string directory;  // empty: fall back to ULTRACORAL_OUT, then "."
  std::vector<std::string> formats{"csv", "json", "svg"};
  double svg_angle_deg = 25.0;
  double svg_length_scale = 10.0;

  bool operator==(const OutputConfig&) const = default;
};

// Sectioned key = value document; defaults are the reference parameters
// (p = 2, alpha = 2, d = 0.1, sigma = eta = 1, beta = -0.2). growth.solver
// is kept in sync with the solver section.
struct RunConfig {
  ModelConfig model;
  SolverConfig solver;
  GrowthConfig growth;
  OutputConfig output;

  bool out_of_regime() const { return !(model.beta < 0.0); }
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Unknown sections/keys and malformed values are ConfigErrors carrying the
// line and column; defaults apply to anything not mentioned.
RunConfig parse_config(std::string_view text);

// dotted-path override, e.g. "model.sigma=0.5"
void apply_override(RunConfig& cfg, std::string_view assignment);

// field-path validation of every embedded invariant
void validate(const RunConfig& cfg);

// canonical text form; parse_config(serialize_config(c)) == c
std::string serialize_config(const RunConfig& cfg);

}  // namespace ultracoral
