#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kc/config.hpp"
#include "kc/oracle.hpp"
#include "kc/pontryagin.hpp"

namespace kc::cli {

struct BlockInput {
  std::string label;
  ModelKind model = ModelKind::synthetic;
  int mode = 0;
  std::optional<OperatorPair> ops;  // PDE models
  std::optional<Pencil> pencil;     // synthetic
  std::optional<wave::KdvOperators> kdv;
  double slope = 0.0;
  int excited_sites = 0;
  const wave::Profile* profile = nullptr;  // vortex pairing check
};

struct PontryaginReport {
  int kappa = 0, dim = 0;
  Inertia gram;
  double invariance = 0.0, contraction = 0.0, cayley = 0.0;
};

struct BlockOutcome {
  std::string label;
  int mode = 0;
  int dim = 0;
  Inertia Lp, Lm, A, K;
  ConstrainedIndices indices;
  DeltaChoice delta;
  CountReport counts, counts_alt;
  ZeroSplit split;
  Spectrum spectrum;
  double band_edge = 0.0;
  PontryaginReport pontryagin;
  std::string oracle_route;
  std::optional<oracle::DirectReport> direct;
  std::vector<oracle::CounterDiff> diff;
  std::optional<oracle::KdvOrthogonality> orth;
  double pairing_error = 0.0;
  std::vector<Verification> verifications;

  bool pass() const;
  const Verification* find(const std::string& name) const;
};

BlockOutcome analyze_block(const BlockInput& in, const Tolerances& tol, std::optional<double> delta_override,
                           bool run_oracle, std::uint64_t seed);

struct ModelSetup {
  std::optional<wave::Profile> profile;
  std::vector<BlockInput> blocks;
};

// Profile solve and operator assembly. Throws ConfigError or NumericalError.
ModelSetup build_model(const RunConfig& c);

// Loads {"A": [[...]], "K": [[...]], "omega_plus": x, "omega_minus": y}.
Pencil load_pencil_json(const std::string& path);

struct AnalysisResult {
  json report;
  std::vector<BlockOutcome> blocks;
  bool pass = false;
};

AnalysisResult run_analysis(const RunConfig& c, bool run_oracle = true);

json counters_json(const CountReport& r);
json verification_json(const Verification& v);

// Writes report.json and one spectrum CSV per block; fills report["spectra_files"].
void write_outputs(AnalysisResult& r, const std::string& out_dir);
void write_spectrum_csv(const BlockOutcome& b, const std::string& path);

struct RandomVerifyOptions {
  int dim_lo = 2, dim_hi = 10;
  int trials = 500;
  std::uint64_t seed = 7;
  double jordan_fraction = 0.2;
  double complex_fraction = 0.2;
  bool positive_K = false;  // Sylvester suite
};

struct TrialResult {
  int index = 0;
  int dim = 0;
  std::string kind;
  bool pass = false;
  std::string failure;
};

struct RandomVerifySummary {
  int trials = 0, passed = 0;
  std::vector<TrialResult> failures;
  double seconds = 0.0;
  std::string text(const RandomVerifyOptions& o) const;  // deterministic, no timings
};

TrialResult run_trial(const RandomVerifyOptions& o, int index);
RandomVerifySummary random_verify(const RandomVerifyOptions& o);

struct SweepResult {
  std::string csv;
  int rows = 0, failed_rows = 0;
};

SweepResult run_sweep(const RunConfig& c);

}  // namespace kc::cli
