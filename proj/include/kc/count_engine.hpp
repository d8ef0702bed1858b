#pragma once

#include <string>
#include <vector>

#include "kc/constrained.hpp"

namespace kc {

enum class ModelKind { synthetic, nls, dnls, vortex, kdv };

ModelKind parse_model(const std::string& name);
const char* model_name(ModelKind m);

struct CountReport {
  int Np_neg = 0, Np_zero = 0, Np_pos = 0;
  int Nn_neg = 0, Nn_zero = 0, Nn_pos = 0;
  int Nc_plus = 0, Nc_minus = 0;
  // positive real points inside the emulated band
  int Np_emb = 0, Nn_emb = 0;
  int dim_HK_neg = 0, dim_HAdK_neg = 0;
  int N_A = 0, N_K = 0;
  int N_real = 0, N_comp = 0, N_imag_neg = 0, N_zero_neg = 0;

  bool operator==(const CountReport&) const = default;
};

// Real gamma with |gamma| <= zero_tol is the zero class. Nn_pos includes embedded points,
// Np_pos only isolated ones (gamma below the band edge).
CountReport tally(const Spectrum& spec, const Pencil& p, double delta, double zero_tol, double inertia_tol);

struct LambdaCounters {
  int N_real = 0, N_comp = 0, N_imag_neg = 0, N_zero_neg = 0;
  bool parity_ok = true;  // KdV: reflection pairs; vortex: N_real even
};

// gamma = -lambda^2. KdV counts are halved because w(x) and w(-x) share gamma.
LambdaCounters lambda_counters(const CountReport& r, ModelKind m);
void fill_lambda_counters(CountReport& r, ModelKind m);

struct Check {
  std::string name;
  std::string relation;  // "==", "<=", ">="
  long lhs = 0;
  long rhs = 0;
  bool pass = false;
  // tolerance checks carry reals instead
  bool real_valued = false;
  double value = 0.0, limit = 0.0;
};

struct Verification {
  std::string name;
  bool applicable = true;
  bool pass = true;
  std::vector<Check> checks;
  std::string note;

  void add(const std::string& name, long lhs, const std::string& rel, long rhs);
  // value <= limit (or >= with rel ">=")
  void add_real(const std::string& name, double value, const std::string& rel, double limit);
};

Verification verify_main(const CountReport& r);
// Not applicable when omega_plus == 0.
Verification verify_upper_bound(const CountReport& r, const Pencil& p);

struct ClosureInputs {
  ModelKind model = ModelKind::synthetic;
  int mode_index = 0;  // vortex block n
  Inertia Lp, Lm, A;
  ConstrainedIndices indices;
  double slope = 0.0;
  int excited_sites = 0;  // DNLS
};

Verification closure_check(const ClosureInputs& in, const CountReport& r);

// P = (sum |f|^2)^2 / (n sum |f|^4) in (0, 1]; small P means a localized vector.
double participation_ratio(const CVec& f);
constexpr double kLocalizedBelow = 0.2;

}  // namespace kc
