#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kc/count_engine.hpp"
#include "kc/wave_operators.hpp"

namespace kc::oracle {

// Counters recovered from a direct eigensolve of the linearized operator.
struct DirectReport {
  CountReport counts;
  std::vector<std::string> fields;  // counters this route determines
  CVec lambda;
  int zero_cluster = 0;             // |lambda| <= lambda_tol
  double symmetry_error = 0.0;      // lambda -> -lambda, conj(lambda)
  double max_offzero_real = 0.0;    // largest |Re lambda| outside the zero cluster
};

// [[0, L-], [-L+, 0]] for NLS-type pairs (weights folded in).
DirectReport direct_nls(const OperatorPair& ops, double lambda_tol);

// sigma3 H_n with lambda = -i mu; ops from vortex_mode_operators(p, n), n >= 1.
DirectReport direct_vortex(const OperatorPair& ops, double lambda_tol);

// Largest |mu + mu'| matching spec(sigma3 H_n) against spec(sigma3 H_-n), relative to 1 + ||sigma3 H_n||.
double vortex_pairing_error(const wave::Profile& p, int n);

struct KdvOrthogonality {
  int real_checked = 0, imag_checked = 0;
  double max_error = 0.0;  // relative to ||L-|| ||w||^2
};

// D L- on the zero-mean basis.
DirectReport direct_kdv(const wave::KdvOperators& k, double lambda_tol, KdvOrthogonality* orth = nullptr);

struct CounterDiff {
  std::string name;
  int pencil = 0, direct = 0;
};

std::vector<CounterDiff> pencil_vs_direct(const CountReport& pencil, const DirectReport& direct);

// Counter lookup by the JSON field name.
int counter_value(const CountReport& r, const std::string& name);
const std::vector<std::string>& counter_names();

struct JordanSpec {
  double gamma0 = 0.0;
  int length = 2;
  int sign = 1;  // sign of [f1, fn]
};

struct RandomPencilSpec {
  int dim = 4;
  int k_negative = -1;  // negative eigenvalues of K; -1 leaves it random
  std::vector<JordanSpec> jordan;
  std::vector<cplx> complex_pairs;  // upper representatives
  bool canonical = true;            // false: K = Q^T diag(+-1) Q, A = K M with M = K^-1 S
};

struct RandomPencil {
  Pencil pencil;
  int kappa = 0;
  std::vector<double> planted_real;  // simple real eigenvalues (canonical route)
};

// Throws ConfigError on an infeasible spec.
RandomPencil random_pencil(const RandomPencilSpec& spec, std::uint64_t seed);

struct RouteCounts {
  int neg = 0, zero = 0, pos = 0, complex_upper = 0;
  bool operator==(const RouteCounts&) const = default;
};

// Eigenvalue-location counts from the K^-1 A route and from QZ on (A, K).
RouteCounts route_counts(const Spectrum& spec, double zero_tol);
RouteCounts qz_route_counts(const Pencil& p, double zero_tol, double cluster_tol = 1e-4);

// Shooting for the radial vortex profile: RK4 from r0 with phi ~ a r^m, bisection on a.
struct ShootingResult {
  double a = 0.0;
  double max_value = 0.0;
  double argmax = 0.0;
  double r_valid = 0.0;  // radius up to which the trajectory stays on the profile
  Vec r, phi;
};

ShootingResult vortex_shooting(int m, double omega, double r_end, double dr = 1e-3);

// Petviashvili iteration for the Kawahara profile (b2 = b3 = 0) on the same grid.
Vec kdv_petviashvili(const wave::KdvCoeffs& co, double c, const wave::Grid1D& g, int max_iter = 2000);

}  // namespace kc::oracle
