#pragma once

#include <optional>

#include "kc/pencil_core.hpp"

namespace kc {

// Discretized L+ and L-. With weights W, the operators are W-symmetric (W L symmetric).
struct OperatorPair {
  Mat Lp;
  Mat Lm;
  double omega_plus = 0.0;
  double omega_minus = 1.0;
  std::optional<Vec> weights;

  // Throws NumericalError if the weighted symmetry check fails at rel_tol.
  void validate(double rel_tol = 1e-10) const;
  Eigen::Index dim() const { return Lp.rows(); }
};

// W^{1/2} L W^{-1/2}, exactly symmetrized.
Mat fold_weights(const Mat& l, const std::optional<Vec>& weights);

// Orthonormal basis (weighted inner product) of the eigenspace with |eig| <= tol * ||L||.
Mat kernel_basis(const Mat& l, const std::optional<Vec>& weights, double tol);

struct ProjectedPencil {
  Pencil pencil;
  Mat Q;        // orthonormal basis of H in folded coordinates
  Mat kernel;   // orthonormal basis of ker L- in folded coordinates
  Mat Sp, Sm;   // folded L+ and L-
  Vec sqrt_w;   // W^{1/2} diagonal (ones without weights)
  Inertia inertia_Lp, inertia_Lm;
  double kernel_gap = 0.0;  // smallest |eig L-| outside the kernel, relative to ||L-||
  // Weighted-space projector off ker L- (original coordinates).
  Mat projector() const;
};

// Kernel eigenvalues in (tol, 10 tol] * ||L-|| are ambiguous and raise NumericalError.
ProjectedPencil project_pencil(const OperatorPair& ops, double tol);

struct DeltaChoice {
  std::optional<double> sigma_neg1;
  double delta = 0.0;
  double delta_alt = 0.0;  // a second admissible shift for invariance checks
  bool fallback = false;
};

// zero_tol is the absolute |gamma| below which a point belongs to the zero class.
DeltaChoice select_delta(const Pencil& p, const Spectrum& spec, double zero_tol);

Mat constrained_index_matrix(const OperatorPair& ops, double mu, double kernel_tol);
// -min(1e-6 ||L+||, 1e-3 * smallest nonzero |eig L+|)
double default_mu(const OperatorPair& ops, double kernel_tol);

struct ConstrainedIndices {
  int n0 = 0, z0 = 0, z1 = 0;
  int n_minus = 0, n_plus = 0;
  std::optional<double> sigma_neg1;
  double delta = 0.0;
  double mu = 0.0;
  // Proposition 1 bookkeeping
  Inertia inertia_A;
  int predicted_neg_A = 0;
  int predicted_zero_A = 0;
  int pos_A_bound = 0;
  bool prop1_consistent = false;
  // Proposition 2 bookkeeping
  int direct_minus = 0, direct_plus = 0;
  bool prop2_consistent = false;
  bool proviso_checked = false;
  bool proviso_ok = true;
  double bifurcating_eig = 0.0;
  double band_bound = 0.0;
};

// z0 counts directions of ker L+ whose component along ker L- exceeds overlap_tol.
void proposition1_indices(const OperatorPair& ops, const ProjectedPencil& pp, double kernel_tol,
                          ConstrainedIndices& out, double overlap_tol = 1e-8);

struct ZeroSplit {
  int n_minus = 0, n_plus = 0;
  int direct_minus = 0, direct_plus = 0;
  bool consistent = false;
};

ZeroSplit zero_splitting(const Pencil& p, const Spectrum& spec, double delta, double zero_tol,
                         double inertia_tol);

}  // namespace kc
