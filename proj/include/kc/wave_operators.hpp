#pragma once

#include <map>
#include <string>
#include <vector>

#include "kc/constrained.hpp"

namespace kc::wave {

enum class GridKind { finite_difference, periodic_spectral };

// Finite difference: n interior points of [-L, L] with Dirichlet ends.
// Periodic: n points x_j = -L + 2L j / n.
struct Grid1D {
  int n_points = 512;
  double half_length = 20.0;
  GridKind kind = GridKind::finite_difference;

  void validate() const;
  double h() const;
  Vec x() const;
};

// Cell-centred points r_i = (i - 1/2) h, h = r_max / n.
struct RadialGrid {
  int n_points = 400;
  double r_max = 60.0;

  void validate() const;
  double h() const { return r_max / n_points; }
  Vec r() const;
  Vec weights() const { return r(); }
};

struct Profile {
  std::string model;
  Vec x;
  Vec values;
  std::map<std::string, double> params;
  double residual = 0.0;
  double slope = 0.0;  // d||phi||^2 / d(omega or c)
  int iterations = 0;
};

double l2_norm_sq(const Profile& p);

// --- NLS on the line, F(s) = -s^sigma

// Fourth-order centred -d2/dx2 with Dirichlet ends.
Mat fd_neg_laplacian(const Grid1D& g);
Profile nls_soliton(int sigma, double omega, const Grid1D& g);
OperatorPair nls_operators(const Profile& p);

// --- discrete NLS, -eps (Delta phi)_n + omega phi_n - phi_n^3 = 0 on M sites

struct DnlsSpec {
  double eps = 0.05;
  double omega = 1.0;
  int sites = 41;
  std::vector<int> pattern{1, 1};  // amplitude signs on consecutive central sites
  int continuation_steps = 20;
};

Profile dnls_state(const DnlsSpec& s);
OperatorPair dnls_operators(const Profile& p);

// --- radial vortex, F(s) = -s + s^2

Mat radial_operator(const RadialGrid& g, double k);  // -(1/r)(r u')' + k^2/r^2 u
Profile vortex_profile(int m, double omega, const RadialGrid& g);
// n >= 1: L+ = H_n, L- = sigma3 H_n sigma3 (two components). n = 0: scalar reduction.
OperatorPair vortex_mode_operators(const Profile& p, int n);
// The mode vector phi' 1 - (m/r) phi sigma3 1 for n = +1, on the 2N grid.
Vec vortex_translation_mode(const Profile& p);

// --- fifth-order KdV on a periodic grid

struct KdvCoeffs {
  double a1 = 0.0, a2 = 1.0, a3 = 1.0;
  double b1 = -1.0, b2 = 0.0, b3 = 0.0;
};

// Spectral first derivative on the full periodic grid (Nyquist mode removed).
Mat spectral_derivative(const Grid1D& g);
// Orthonormal real Fourier basis without the constant and Nyquist modes: cos then sin, k = 1..n/2-1.
Mat zero_mean_basis(const Grid1D& g);
Profile kdv_profile(const KdvCoeffs& co, double c, const Grid1D& g);
Mat kdv_lminus_full(const Profile& p);

struct KdvOperators {
  OperatorPair ops;  // L+ = D_Z^T L-_Z D_Z and L-_Z on the zero-mean basis
  Mat Z;             // basis columns on the grid
  Mat D;             // derivative on the basis
  Vec reflection;    // +1 on cos modes, -1 on sin modes
};

KdvOperators kdv_operators(const Profile& p);

// --- CSV exchange (columns: coordinate, value)
void write_profile_csv(const Profile& p, const std::string& path);
Profile read_profile_csv(const std::string& path);

}  // namespace kc::wave
