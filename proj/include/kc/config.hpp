#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kc/count_engine.hpp"
#include "kc/wave_operators.hpp"

namespace kc::cli {

using json = nlohmann::ordered_json;

// TOML subset: [table] and [a.b] headers, key = value with strings, numbers, booleans and
// flat arrays, # comments. Throws ConfigError with the line number.
json parse_toml(const std::string& text, const std::string& origin = "<config>");

struct Tolerances {
  double cluster = 1e-7;
  double kernel = 1e-6;
  double zero = 1e-6;
  double overlap = 1e-8;  // z0 cut on the component of ker L+ along ker L-
};

// Per-model defaults used when the config leaves a tolerance out.
Tolerances default_tolerances(ModelKind m);

struct SweepSpec {
  std::string parameter;
  double from = 0.0, to = 0.0;
  int steps = 0;
  std::vector<double> values() const;
};

struct RunConfig {
  std::string name;
  ModelKind model = ModelKind::synthetic;
  // nls
  int sigma = 1;
  double omega = 1.0;
  wave::Grid1D grid;
  // dnls
  wave::DnlsSpec dnls;
  // vortex
  int charge = 1;
  std::vector<int> modes{0, 1, 2};
  wave::RadialGrid radial;
  // kdv
  wave::KdvCoeffs kdv;
  double speed = 0.1;
  // synthetic: JSON file with A, K and optional omega_plus, omega_minus
  std::string pencil_file;

  Tolerances tol;
  std::optional<double> delta;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 1;
  json source;  // the parsed document, echoed in reports
};

RunConfig parse_config(const std::string& text, const std::string& origin, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// KC_TOL_CLUSTER, KC_TOL_KERNEL, KC_TOL_ZERO, KC_TOL_OVERLAP, KC_DELTA, KC_SEED.
void apply_env_overrides(RunConfig& c);

// Sets a numeric model parameter by its config key (used by sweeps).
void set_parameter(RunConfig& c, const std::string& key, double value);

}  // namespace kc::cli
