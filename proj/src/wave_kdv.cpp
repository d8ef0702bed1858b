#include <cmath>
#include <numbers>
#include <sstream>

#include "kc/errors.hpp"
#include "kc/wave_operators.hpp"

namespace kc::wave {

namespace {

double wavenumber(const Grid1D& g, int k) { return std::numbers::pi * k / g.half_length; }

// Orthonormal real Fourier basis: constant, cos k, sin k (k = 1..n/2-1), Nyquist.
Mat full_fourier_basis(const Grid1D& g) {
  const int n = g.n_points;
  const Vec x = g.x();
  Mat b(n, n);
  b.col(0).setConstant(1.0 / std::sqrt(n));
  const int half = n / 2;
  for (int k = 1; k < half; ++k) {
    const double kk = wavenumber(g, k);
    for (int j = 0; j < n; ++j) {
      b(j, k) = std::sqrt(2.0 / n) * std::cos(kk * x(j));
      b(j, half - 1 + k) = std::sqrt(2.0 / n) * std::sin(kk * x(j));
    }
  }
  for (int j = 0; j < n; ++j) b(j, n - 1) = std::cos(wavenumber(g, half) * x(j)) / std::sqrt(n);
  return b;
}

// Even modes: constant, cos k (k = 1..n/2-1), Nyquist.
Mat even_basis(const Grid1D& g) {
  const Mat b = full_fourier_basis(g);
  const int half = g.n_points / 2;
  Mat e(g.n_points, half + 1);
  e.leftCols(half) = b.leftCols(half);
  e.col(half) = b.col(g.n_points - 1);
  return e;
}

struct KdvSystem {
  Mat D, D2, D4;
  KdvCoeffs co;
  double c;
};

Vec kdv_residual(const KdvSystem& s, const Vec& phi) {
  const auto& co = s.co;
  const Vec d1 = s.D * phi, d2 = s.D2 * phi;
  return ((co.a1 + s.c) * phi - co.a2 * d2 + co.a3 * (s.D4 * phi)).array() + 1.5 * co.b1 * phi.array().square() -
         co.b2 * (phi.array() * d2.array() + 0.5 * d1.array().square()) + 2.0 * co.b3 * phi.array().cube();
}

Mat kdv_jacobian(const KdvSystem& s, const Vec& phi) {
  const auto& co = s.co;
  Mat l = co.a3 * s.D4 - co.a2 * s.D2;
  l.diagonal().array() += co.a1 + s.c + 3.0 * co.b1 * phi.array() + 6.0 * co.b3 * phi.array().square();
  if (co.b2 != 0.0) {
    l -= co.b2 * (s.D * phi.asDiagonal() * s.D);
    l.diagonal() -= co.b2 * (s.D2 * phi);
  }
  return la::symmetrize(l);
}

KdvSystem make_system(const Grid1D& g, const KdvCoeffs& co, double c) {
  KdvSystem s;
  s.D = spectral_derivative(g);
  s.D2 = s.D * s.D;
  s.D4 = s.D2 * s.D2;
  s.co = co;
  s.c = c;
  return s;
}

Vec kdv_newton(const KdvSystem& s, const Mat& e, Vec phi, int& iters, double& res) {
  for (iters = 0; iters < 50; ++iters) {
    const Vec f = kdv_residual(s, phi);
    res = f.norm();
    if (res <= 1e-12 * phi.norm()) return phi;
    const Mat j = e.transpose() * kdv_jacobian(s, phi) * e;
    phi -= e * j.partialPivLu().solve(e.transpose() * f);
  }
  std::ostringstream os;
  os << "kdv_profile: Newton did not converge in 50 iterations (residual " << res << ")";
  throw NumericalError(os.str());
}

}  // namespace

Mat spectral_derivative(const Grid1D& g) {
  const int n = g.n_points;
  const int half = n / 2;
  const Mat b = full_fourier_basis(g);
  Mat dh = Mat::Zero(n, n);
  for (int k = 1; k < half; ++k) {
    const double kk = wavenumber(g, k);
    dh(half - 1 + k, k) = -kk;  // cos -> -k sin
    dh(k, half - 1 + k) = kk;   // sin -> k cos
  }
  Mat d = b * dh * b.transpose();
  return 0.5 * (d - d.transpose());
}

Mat zero_mean_basis(const Grid1D& g) {
  const Mat b = full_fourier_basis(g);
  return b.middleCols(1, g.n_points - 2);
}

Profile kdv_profile(const KdvCoeffs& co, double c, const Grid1D& g) {
  g.validate();
  if (g.kind != GridKind::periodic_spectral) throw ConfigError("kdv: needs a periodic spectral grid");
  if (g.n_points % 2 != 0) throw ConfigError("kdv: n_points must be even");
  if (!(co.a3 > 0)) throw ConfigError("kdv: a3 must be positive");
  if (!(c > 0)) throw ConfigError("kdv: wave speed c must be positive");
  for (int k = 0; k <= g.n_points / 2; ++k) {
    const double kk = wavenumber(g, k);
    if (co.a1 + co.a2 * kk * kk + co.a3 * kk * kk * kk * kk < 0)
      throw ConfigError("kdv: c_wave(k) = a1 + a2 k^2 + a3 k^4 is negative on the grid");
  }
  if (co.b1 == 0.0) throw ConfigError("kdv: the seed needs b1 != 0");
  const Vec x = g.x();
  const double scale = co.a2 > 0 ? std::sqrt(c / co.a2) : std::sqrt(c);
  const Vec seed = x.unaryExpr([&](double t) {
    const double s = 1.0 / std::cosh(scale * t / 2.0);
    return -(c / co.b1) * s * s;
  });
  const Mat e = even_basis(g);
  Profile p;
  p.model = "kdv";
  p.x = x;
  p.params = {{"a1", co.a1}, {"a2", co.a2}, {"a3", co.a3}, {"b1", co.b1},
              {"b2", co.b2}, {"b3", co.b3}, {"c", c}};
  p.values = kdv_newton(make_system(g, co, c), e, e * (e.transpose() * seed), p.iterations, p.residual);
  const double mx = p.values.cwiseAbs().maxCoeff();
  if (std::abs(p.values(0)) > 1e-6 * mx) throw NumericalError("kdv_profile: solution does not decay on the domain");

  const double dc = 1e-3 * c;
  auto mass = [&](double cc) {
    int it;
    double r;
    Profile q = p;
    q.values = kdv_newton(make_system(g, co, cc), e, p.values, it, r);
    return l2_norm_sq(q);
  };
  p.slope = (mass(c + dc) - mass(c - dc)) / (2 * dc);
  return p;
}

Mat kdv_lminus_full(const Profile& p) {
  KdvCoeffs co{p.params.at("a1"), p.params.at("a2"), p.params.at("a3"),
               p.params.at("b1"), p.params.at("b2"), p.params.at("b3")};
  const double h = p.x(1) - p.x(0);
  const Grid1D g{static_cast<int>(p.x.size()), h * p.x.size() / 2.0, GridKind::periodic_spectral};
  return kdv_jacobian(make_system(g, co, p.params.at("c")), p.values);
}

KdvOperators kdv_operators(const Profile& p) {
  const double h = p.x(1) - p.x(0);
  const Grid1D g{static_cast<int>(p.x.size()), h * p.x.size() / 2.0, GridKind::periodic_spectral};
  KdvOperators out;
  out.Z = zero_mean_basis(g);
  const Mat d = spectral_derivative(g);
  const Mat lm = kdv_lminus_full(p);
  out.D = out.Z.transpose() * d * out.Z;
  out.D = 0.5 * (out.D - out.D.transpose());
  out.ops.Lm = la::symmetrize(out.Z.transpose() * lm * out.Z);
  out.ops.Lp = la::symmetrize(out.D.transpose() * out.ops.Lm * out.D);
  out.ops.omega_plus = 0.0;
  out.ops.omega_minus = p.params.at("c");
  const int half = g.n_points / 2;
  out.reflection = Vec::Ones(g.n_points - 2);
  out.reflection.tail(half - 1).setConstant(-1.0);
  return out;
}

}  // namespace kc::wave
