#pragma once

#include <vector>

#include "kc/linalg.hpp"

namespace kc {

// Dense real symmetric matrix. The input is symmetrized on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Mat& m);

  Eigen::Index dim() const { return m_.rows(); }
  const Mat& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  // ||M - M^T|| / ||M|| of the matrix passed in (Frobenius norms).
  double input_asymmetry() const { return asym_; }

 private:
  Mat m_;
  double asym_ = 0.0;
};

struct Inertia {
  int n_neg = 0;
  int n_zero = 0;
  int n_pos = 0;

  int dim() const { return n_neg + n_zero + n_pos; }
  bool operator==(const Inertia&) const = default;
};

// Eigenvalues are compared with zero_tol * ||M||_2.
Inertia inertia(const SymMatrix& m, double zero_tol);
Inertia inertia_from_values(const Vec& eigenvalues, double zero_tol);

// A u = gamma K u on R^n with thresholds standing in for essential-spectrum edges.
class Pencil {
 public:
  static constexpr double kNoBand = 1e150;

  Pencil(SymMatrix a, SymMatrix k, double omega_plus = kNoBand, double omega_minus = kNoBand);

  const SymMatrix& A() const { return a_; }
  const SymMatrix& K() const { return k_; }
  Eigen::Index dim() const { return a_.dim(); }
  double omega_plus() const { return omega_plus_; }
  double omega_minus() const { return omega_minus_; }
  // Real gamma at or above omega_plus * omega_minus lies in the emulated band.
  double band_edge() const { return omega_plus_ * omega_minus_; }
  double norm_A() const { return norm_a_; }
  double norm_K() const { return norm_k_; }

  // When K is itself an inverse (K = M^-1), passing M lets solvers form K^-1 A = M A
  // without a second inversion. M must satisfy ||M K - I|| small; this is checked.
  void set_inverse_metric(const Mat& m);
  bool has_inverse_metric() const { return k_inv_.size() > 0; }
  // K^-1 B, by the stored inverse when present, otherwise by LU.
  Mat solve_metric(const Mat& b) const;

 private:
  SymMatrix a_, k_;
  Mat k_inv_;
  double omega_plus_, omega_minus_;
  double norm_a_ = 0.0, norm_k_ = 0.0;
};

struct SolveOptions {
  double cluster_tol = 1e-7;   // relative, scaled by (1 + |gamma|)
  double geom_tol = 1e-8;      // singular value cut for geom_mult
  double merge_radius = 1e-3;  // second pass for scatter of defective eigenvalues
  double gram_tol = 1e-8;
  double chain_tol = 1e-6;
};

struct EigenPoint {
  cplx gamma;
  int alg_mult = 1;
  int geom_mult = 1;
  // Jordan chain f_1..f_n for defective points, eigenspace basis otherwise.
  CMat chain;
  bool chain_complete = false;
  int krein_np = -1;
  int krein_nn = -1;
  bool is_embedded = false;
  // (K f_1, f_n) for chains, the single Gram entry for simple points.
  double top_product = 0.0;
  double residual = 0.0;

  bool is_real() const { return gamma.imag() == 0.0; }
  bool is_defective() const { return alg_mult > geom_mult; }
  bool classified() const { return krein_np >= 0 && krein_nn >= 0; }
};

struct Spectrum {
  std::vector<EigenPoint> points;
  int total_dim = 0;
  double residual = 0.0;
  double solver_tol = 0.0;
};

Spectrum solve_pencil(const Pencil& p, const SolveOptions& opt = {});
EigenPoint jordan_chain(const Pencil& p, const EigenPoint& point, const SolveOptions& opt = {});
Spectrum krein_classify(const Pencil& p, Spectrum spec, const SolveOptions& opt = {});
// solve_pencil, chains for every defective point, then krein_classify.
Spectrum analyze_pencil(const Pencil& p, const SolveOptions& opt = {});

// (K f, g) with the sesquilinear convention g^H K f.
cplx kform(const Mat& k, const CVec& f, const CVec& g);
double kform(const Mat& k, const Vec& f, const Vec& g);

}  // namespace kc
