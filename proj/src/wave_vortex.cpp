#include <cmath>
#include <sstream>

#include "kc/errors.hpp"
#include "kc/wave_operators.hpp"

namespace kc::wave {

void RadialGrid::validate() const {
  if (n_points < 16) throw ConfigError("radial grid: n_points must be at least 16");
  if (!(r_max > 0)) throw ConfigError("radial grid: r_max must be positive");
}

Vec RadialGrid::r() const {
  Vec r(n_points);
  for (int i = 0; i < n_points; ++i) r(i) = (i + 0.5) * h();
  return r;
}

Mat radial_operator(const RadialGrid& g, double k) {
  const int n = g.n_points;
  const double h = g.h();
  const Vec r = g.r();
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double rp = r(i) + 0.5 * h, rm = r(i) - 0.5 * h;
    m(i, i) = (rp + rm) / (r(i) * h * h) + k * k / (r(i) * r(i));
    if (i > 0) m(i, i - 1) = -rm / (r(i) * h * h);
    if (i + 1 < n) m(i, i + 1) = -rp / (r(i) * h * h);
  }
  return m;
}

namespace {

RadialGrid grid_of(const Profile& p) {
  const double h = p.x(1) - p.x(0);
  return RadialGrid{static_cast<int>(p.x.size()), h * p.x.size()};
}

struct NewtonOut {
  Vec phi;
  int iters = 0;
  double res = 0.0;
  bool ok = false;
};

// -Delta_m phi + omega phi - phi^3 + phi^5 = 0
NewtonOut vortex_newton(const Mat& lap, double omega, Vec phi) {
  NewtonOut o;
  for (o.iters = 0; o.iters < 60; ++o.iters) {
    const Vec s = phi.array().square();
    const Vec f = lap * phi + (omega - s.array() + s.array().square()).matrix().cwiseProduct(phi);
    o.res = f.norm();
    if (!std::isfinite(o.res)) break;
    if (o.res <= 1e-11 * phi.norm()) {
      o.ok = true;
      break;
    }
    Mat j = lap;
    j.diagonal().array() += omega - 3.0 * s.array() + 5.0 * s.array().square();
    phi -= j.partialPivLu().solve(f);
  }
  o.phi = std::move(phi);
  return o;
}

// Seeds tried in order. The first is A (r/(1+r))^m sech(k (r - r0)) with A = 0.8, k = sqrt(omega), r0 = 6.
std::vector<Vec> vortex_seeds(const Vec& r, int m, double omega) {
  std::vector<Vec> seeds;
  auto shaped = [&](double a, double k, double r0) {
    return Vec(r.unaryExpr([&](double t) { return a * std::pow(t / (1 + t), m) / std::cosh(k * (t - r0)); }));
  };
  seeds.push_back(shaped(0.8, std::sqrt(omega), 6.0));
  seeds.push_back(shaped(0.9, 0.3, 6.0));
  seeds.push_back(shaped(0.6, 0.3, 6.0));
  seeds.push_back(r.unaryExpr([&](double t) {
    return std::sqrt(0.5) * std::pow(std::tanh(t / 2), m) / std::cosh(std::sqrt(omega) * std::max(t - 6.0, 0.0));
  }));
  return seeds;
}

// Accept positive, nontrivial, decayed solutions only.
bool plausible(const Vec& phi) {
  const double mx = phi.maxCoeff();
  return mx > 0.05 && phi.minCoeff() >= -1e-8 * mx && std::abs(phi(phi.size() - 1)) <= 1e-6 * mx;
}

}  // namespace

Profile vortex_profile(int m, double omega, const RadialGrid& g) {
  g.validate();
  if (m < 1) throw ConfigError("vortex: charge m must be positive");
  if (!(omega > 0 && omega < 3.0 / 16.0))
    throw ConfigError("vortex: omega must lie in (0, 3/16) for the cubic-quintic nonlinearity");
  const Vec r = g.r();
  const Mat lap = radial_operator(g, m);
  Profile p;
  p.model = "vortex";
  p.x = r;
  p.params = {{"m", double(m)}, {"omega", omega}};
  std::ostringstream trace;
  bool found = false;
  for (const Vec& s : vortex_seeds(r, m, omega)) {
    NewtonOut o = vortex_newton(lap, omega, s);
    trace << " [" << o.iters << " its, residual " << o.res << "]";
    if (o.ok && plausible(o.phi)) {
      p.values = std::move(o.phi);
      p.iterations = o.iters;
      p.residual = o.res;
      found = true;
      break;
    }
  }
  if (!found) throw NumericalError("vortex_profile: Newton failed from every seed:" + trace.str());

  const double dw = 1e-4;
  auto mass = [&](double w) {
    NewtonOut o = vortex_newton(lap, w, p.values);
    if (!o.ok) throw NumericalError("vortex_profile: Newton failed in the slope evaluation");
    Profile q = p;
    q.values = o.phi;
    return l2_norm_sq(q);
  };
  p.slope = (mass(omega + dw) - mass(omega - dw)) / (2 * dw);
  return p;
}

OperatorPair vortex_mode_operators(const Profile& p, int n) {
  if (n < 0) throw ConfigError("vortex: mode index n must be nonnegative (H_-n is the sigma1 conjugate of H_n)");
  const RadialGrid g = grid_of(p);
  const int m = static_cast<int>(p.params.at("m"));
  const double omega = p.params.at("omega");
  const Vec s = p.values.array().square();
  const Vec f = (-s.array() + s.array().square()).matrix();           // F(phi^2)
  const Vec fp = (-s.array() + 2.0 * s.array().square()).matrix();    // phi^2 F'(phi^2)
  const int nn = g.n_points;
  OperatorPair ops;
  ops.omega_plus = omega;
  ops.omega_minus = omega;
  if (n == 0) {
    const Mat lap = radial_operator(g, m);
    ops.Lp = lap;
    ops.Lp.diagonal() += (Vec::Constant(nn, omega) + f + 2.0 * fp);
    ops.Lm = lap;
    ops.Lm.diagonal() += (Vec::Constant(nn, omega) + f);
    ops.weights = g.weights();
    return ops;
  }
  Mat h = Mat::Zero(2 * nn, 2 * nn);
  h.topLeftCorner(nn, nn) = radial_operator(g, n + m);
  h.bottomRightCorner(nn, nn) = radial_operator(g, n - m);
  h.diagonal() += (Vec::Constant(2 * nn, omega) + Vec(f.replicate(2, 1)) + Vec(fp.replicate(2, 1)));
  h.topRightCorner(nn, nn).diagonal() = fp;
  h.bottomLeftCorner(nn, nn).diagonal() = fp;
  ops.Lp = h;
  ops.Lm = h;
  ops.Lm.topRightCorner(nn, nn) *= -1.0;
  ops.Lm.bottomLeftCorner(nn, nn) *= -1.0;
  ops.weights = Vec(g.weights().replicate(2, 1));
  return ops;
}

Vec vortex_translation_mode(const Profile& p) {
  const Vec& r = p.x;
  const Vec& phi = p.values;
  const int n = static_cast<int>(phi.size());
  const double h = r(1) - r(0);
  const double m = p.params.at("m");
  Vec d(n);
  for (int i = 1; i + 1 < n; ++i) d(i) = (phi(i + 1) - phi(i - 1)) / (2 * h);
  d(0) = (-3 * phi(0) + 4 * phi(1) - phi(2)) / (2 * h);
  d(n - 1) = (3 * phi(n - 1) - 4 * phi(n - 2) + phi(n - 3)) / (2 * h);
  Vec v(2 * n);
  v.head(n) = d - m * phi.cwiseQuotient(r);
  v.tail(n) = d + m * phi.cwiseQuotient(r);
  return v;
}

}  // namespace kc::wave
