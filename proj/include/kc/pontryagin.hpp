#pragma once

#include <cstdint>

#include "kc/pencil_core.hpp"

namespace kc {

// Eigensplit of K into its negative and positive parts, [x, y] := (K x, y).
struct MetricSplit {
  Mat K;
  int kappa = 0;
  Mat P_minus;  // orthonormal columns, K-negative eigenvectors
  Mat P_plus;
  Vec lam_minus;  // matching eigenvalues of K
  Vec lam_plus;
};

MetricSplit metric_split(const SymMatrix& k);

class Subspace {
 public:
  Subspace() = default;
  // Throws NumericalError if the columns are not numerically independent.
  explicit Subspace(CMat basis);
  static Subspace from_real(const Mat& basis) { return Subspace(basis.cast<cplx>()); }

  const CMat& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.cols()); }

 private:
  CMat basis_;
};

// Inertia of the Hermitian Gram matrix B^H K B; zeros are |ev| <= tol * ||K|| * max ||b_i||^2.
Inertia gram_signature(const Subspace& s, const MetricSplit& m, double tol = 1e-8);

struct NonpositiveSubspace {
  Subspace subspace;
  int kappa = 0;
  Inertia gram;
  double invariance_residual = 0.0;  // ||T Q - Q C|| / ||T||, Q orthonormal basis
};

// Assembles the maximal non-positive T-invariant subspace, T = (A + delta K)^-1 K,
// from a classified spectrum. Throws TheoremViolation if its dimension is not kappa.
NonpositiveSubspace maximal_nonpositive_subspace(const Pencil& p, const Spectrum& spec, double delta,
                                                 double gram_tol = 1e-8);

double invariance_residual(const Pencil& p, double delta, const CMat& basis);

// max over random g of |[Ug, Ug] - [g, g]| / (||g||^2 ||K||), U = (T - conj z)(T - z)^-1.
double cayley_isometry_residual(const Pencil& p, double delta, cplx z, int trial_count, std::uint64_t seed);

// Norm of x_- -> x_+ whose graph is S, in coordinates where [.,.] = -I (+) I.
double contraction_witness(const Subspace& s, const MetricSplit& m);

}  // namespace kc
