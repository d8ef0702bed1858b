#include <cmath>
#include <sstream>

#include "kc/errors.hpp"
#include "kc/simd.hpp"
#include "kc/wave_operators.hpp"

namespace kc::wave {

void Grid1D::validate() const {
  if (n_points < 16) throw ConfigError("grid: n_points must be at least 16");
  if (!(half_length > 0)) throw ConfigError("grid: half_length must be positive");
}

double Grid1D::h() const {
  return kind == GridKind::finite_difference ? 2.0 * half_length / (n_points + 1) : 2.0 * half_length / n_points;
}

Vec Grid1D::x() const {
  Vec x(n_points);
  const double hh = h();
  const int off = kind == GridKind::finite_difference ? 1 : 0;
  for (int i = 0; i < n_points; ++i) x(i) = -half_length + hh * (i + off);
  return x;
}

double l2_norm_sq(const Profile& p) {
  const Vec& v = p.values;
  const auto n = static_cast<std::size_t>(v.size());
  if (p.model == "vortex") {
    const double h = p.x.size() > 1 ? p.x(1) - p.x(0) : 1.0;
    return h * simd::wdot(p.x.data(), v.data(), v.data(), n);
  }
  const double h = p.model == "dnls" ? 1.0 : (p.x.size() > 1 ? p.x(1) - p.x(0) : 1.0);
  return h * simd::dot(v.data(), v.data(), n);
}

namespace {

constexpr double kStencil4[3] = {2.5, -4.0 / 3.0, 1.0 / 12.0};

// Newton for -u'' + omega u - u^(2 sigma + 1) = 0. The residual uses the banded kernel.
Vec nls_newton(const Mat& neg_lap, double h, int sigma, double omega, Vec phi, int& iters, double& res) {
  const auto n = static_cast<std::size_t>(phi.size());
  const double c[3] = {0.0, kStencil4[1] / (h * h), kStencil4[2] / (h * h)};
  Vec diag(phi.size()), f(phi.size());
  for (iters = 0; iters < 50; ++iters) {
    const Vec p2s = phi.array().pow(2 * sigma);
    diag = Vec::Constant(phi.size(), kStencil4[0] / (h * h) + omega) - p2s;
    simd::stencil_apply(c, 2, diag.data(), phi.data(), f.data(), n);
    res = f.norm();
    if (res <= 1e-11 * phi.norm()) return phi;
    Mat j = neg_lap;
    j.diagonal().array() += omega - (2.0 * sigma + 1.0) * p2s.array();
    phi -= j.partialPivLu().solve(f);
  }
  std::ostringstream os;
  os << "nls_soliton: Newton did not converge in 50 iterations (residual " << res << ")";
  throw NumericalError(os.str());
}

Vec nls_seed(const Vec& x, int sigma, double omega) {
  const double amp = std::pow((sigma + 1.0) * omega, 1.0 / (2.0 * sigma));
  return x.unaryExpr([&](double t) { return amp * std::pow(1.0 / std::cosh(sigma * std::sqrt(omega) * t), 1.0 / sigma); });
}

}  // namespace

Mat fd_neg_laplacian(const Grid1D& g) {
  const int n = g.n_points;
  const double ih2 = 1.0 / (g.h() * g.h());
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = kStencil4[0] * ih2;
    for (int k = 1; k <= 2; ++k) {
      if (i + k < n) m(i, i + k) = m(i + k, i) = kStencil4[k] * ih2;
    }
  }
  return m;
}

Profile nls_soliton(int sigma, double omega, const Grid1D& g) {
  g.validate();
  if (sigma < 1) throw ConfigError("nls: sigma must be a positive integer");
  if (!(omega > 0)) throw ConfigError("nls: omega must be positive");
  if (g.kind != GridKind::finite_difference) throw ConfigError("nls: needs a finite-difference grid");
  const Vec x = g.x();
  const Mat nl = fd_neg_laplacian(g);
  Profile p;
  p.model = "nls";
  p.x = x;
  p.params = {{"sigma", double(sigma)}, {"omega", omega}};
  p.values = nls_newton(nl, g.h(), sigma, omega, nls_seed(x, sigma, omega), p.iterations, p.residual);

  const double dw = 1e-3 * omega;
  auto mass = [&](double w) {
    int it;
    double r;
    Profile q = p;
    q.values = nls_newton(nl, g.h(), sigma, w, nls_seed(x, sigma, w), it, r);
    return l2_norm_sq(q);
  };
  p.slope = (mass(omega + dw) - mass(omega - dw)) / (2.0 * dw);
  return p;
}

OperatorPair nls_operators(const Profile& p) {
  const int sigma = static_cast<int>(p.params.at("sigma"));
  const double omega = p.params.at("omega");
  Grid1D g{static_cast<int>(p.x.size()), -p.x(0) + (p.x(1) - p.x(0)), GridKind::finite_difference};
  const Mat nl = fd_neg_laplacian(g);
  const Vec p2s = p.values.array().pow(2 * sigma);
  OperatorPair ops;
  ops.Lp = nl;
  ops.Lp.diagonal().array() += omega - (2.0 * sigma + 1.0) * p2s.array();
  ops.Lm = nl;
  ops.Lm.diagonal().array() += omega - p2s.array();
  ops.omega_plus = omega;
  ops.omega_minus = omega;
  return ops;
}

namespace {

Mat lattice_neg_laplacian(int m) {
  Mat d = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    d(i, i) = 2.0;
    if (i + 1 < m) d(i, i + 1) = d(i + 1, i) = -1.0;
  }
  return d;
}

Vec dnls_continue(const DnlsSpec& s, double omega, int& iters, double& res) {
  const int m = s.sites;
  const int nex = static_cast<int>(s.pattern.size());
  Vec phi = Vec::Zero(m);
  const int start = (m - nex) / 2;
  for (int j = 0; j < nex; ++j) phi(start + j) = std::sqrt(omega) * (s.pattern[j] >= 0 ? 1.0 : -1.0);
  const Mat nd = lattice_neg_laplacian(m);
  iters = 0;
  res = 0.0;
  for (int step = 1; step <= s.continuation_steps; ++step) {
    const double eps = s.eps * step / s.continuation_steps;
    bool ok = false;
    for (int it = 0; it < 50; ++it, ++iters) {
      const Vec f = eps * (nd * phi) + omega * phi - phi.array().cube().matrix();
      res = f.norm();
      if (res <= 1e-13 * phi.norm()) {
        ok = true;
        break;
      }
      Mat j = eps * nd;
      j.diagonal().array() += omega - 3.0 * phi.array().square();
      phi -= j.partialPivLu().solve(f);
    }
    if (!ok) {
      std::ostringstream os;
      os << "dnls_state: continuation failed at eps = " << eps << " (residual " << res << ")";
      throw NumericalError(os.str());
    }
  }
  return phi;
}

}  // namespace

Profile dnls_state(const DnlsSpec& s) {
  if (s.sites < 3) throw ConfigError("dnls: need at least 3 sites");
  if (s.pattern.empty() || static_cast<int>(s.pattern.size()) > s.sites)
    throw ConfigError("dnls: pattern must be non-empty and fit on the lattice");
  if (!(s.omega > 0) || s.eps < 0 || s.continuation_steps < 1) throw ConfigError("dnls: bad omega/eps/steps");
  Profile p;
  p.model = "dnls";
  p.x.resize(s.sites);
  for (int i = 0; i < s.sites; ++i) p.x(i) = i - (s.sites - 1) / 2.0;
  p.params = {{"eps", s.eps}, {"omega", s.omega}, {"excited", double(s.pattern.size())}};
  p.values = dnls_continue(s, s.omega, p.iterations, p.residual);
  const double dw = 1e-4 * s.omega;
  int it;
  double r;
  Profile a = p, b = p;
  a.values = dnls_continue(s, s.omega + dw, it, r);
  b.values = dnls_continue(s, s.omega - dw, it, r);
  p.slope = (l2_norm_sq(a) - l2_norm_sq(b)) / (2.0 * dw);
  return p;
}

OperatorPair dnls_operators(const Profile& p) {
  const double eps = p.params.at("eps");
  const double omega = p.params.at("omega");
  const Mat nd = eps * lattice_neg_laplacian(static_cast<int>(p.values.size()));
  OperatorPair ops;
  ops.Lp = nd;
  ops.Lp.diagonal().array() += omega - 3.0 * p.values.array().square();
  ops.Lm = nd;
  ops.Lm.diagonal().array() += omega - p.values.array().square();
  ops.omega_plus = omega;
  ops.omega_minus = omega;
  return ops;
}

}  // namespace kc::wave
