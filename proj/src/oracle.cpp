#include "kc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "kc/errors.hpp"

namespace kc::oracle {

namespace {

double real_tol(cplx z) { return 1e-6 * std::max(1.0, std::abs(z)); }
bool is_real_l(cplx z) { return std::abs(z.imag()) <= real_tol(z); }
bool is_imag_l(cplx z) { return std::abs(z.real()) <= real_tol(z); }

// Groups of indices whose eigenvalues lie within 1e-7 (1 + |z|) of each other.
std::vector<std::vector<Eigen::Index>> group(const CVec& v, const std::vector<Eigen::Index>& idx) {
  std::vector<Eigen::Index> order = idx;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return v(a).real() != v(b).real() ? v(a).real() < v(b).real() : v(a).imag() < v(b).imag();
  });
  std::vector<std::vector<Eigen::Index>> out;
  for (auto i : order) {
    bool placed = false;
    for (auto& g : out) {
      if (std::abs(v(g.front()) - v(i)) <= 1e-7 * (1 + std::abs(v(i)))) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) out.push_back({i});
  }
  return out;
}

// Inertia of U^H S U over the columns of a group.
Inertia group_signature(const Mat& s, const CMat& vecs, const std::vector<Eigen::Index>& g) {
  CMat u(vecs.rows(), static_cast<Eigen::Index>(g.size()));
  for (std::size_t j = 0; j < g.size(); ++j) u.col(static_cast<Eigen::Index>(j)) = vecs.col(g[j]);
  CMat gram = u.adjoint() * s.cast<cplx>() * u;
  gram = 0.5 * (gram + gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(gram, Eigen::EigenvaluesOnly);
  return inertia_from_values(es.eigenvalues(), 1e-10);
}

double symmetry_error(const CVec& l, const std::vector<Eigen::Index>& idx, bool plus_minus) {
  double err = 0;
  for (auto i : idx) {
    double best_conj = INFINITY, best_neg = INFINITY;
    for (auto j : idx) {
      best_conj = std::min(best_conj, std::abs(l(j) - std::conj(l(i))));
      if (plus_minus) best_neg = std::min(best_neg, std::abs(l(j) + l(i)));
    }
    const double s = std::max(1.0, std::abs(l(i)));
    err = std::max(err, best_conj / s);
    if (plus_minus) err = std::max(err, best_neg / s);
  }
  return err;
}

std::vector<Eigen::Index> outside_zero(const CVec& l, double tol, int& zero) {
  std::vector<Eigen::Index> idx;
  zero = 0;
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    if (std::abs(l(i)) <= tol)
      ++zero;
    else
      idx.push_back(i);
  }
  return idx;
}

double max_real(const CVec& l, const std::vector<Eigen::Index>& idx) {
  double m = 0;
  for (auto i : idx) m = std::max(m, std::abs(l(i).real()));
  return m;
}

}  // namespace

DirectReport direct_nls(const OperatorPair& ops, double lambda_tol) {
  ops.validate();
  const Mat sp = fold_weights(ops.Lp, ops.weights);
  const Mat sm = fold_weights(ops.Lm, ops.weights);
  const Eigen::Index n = sp.rows();
  Mat b = Mat::Zero(2 * n, 2 * n);
  b.topRightCorner(n, n) = sm;
  b.bottomLeftCorner(n, n) = -sp;
  const la::Eig e = la::general_eig(b, true);

  DirectReport d;
  d.lambda = e.values;
  d.fields = {"N_real", "N_comp", "N_imag_neg", "Np_neg", "Nn_neg", "Nn_pos", "Nc_plus"};
  const auto idx = outside_zero(e.values, lambda_tol, d.zero_cluster);
  d.symmetry_error = symmetry_error(e.values, idx, true);
  d.max_offzero_real = max_real(e.values, idx);

  const CMat u = e.vectors.topRows(n);
  std::vector<Eigen::Index> real_pos, imag_pos;
  for (auto i : idx) {
    const cplx z = e.values(i);
    if (is_real_l(z)) {
      if (z.real() > 0) real_pos.push_back(i);
    } else if (is_imag_l(z)) {
      if (z.imag() > 0) imag_pos.push_back(i);
    } else if (z.real() > 0 && z.imag() > 0) {
      ++d.counts.Nc_plus;
    }
  }
  // real lambda: Krein sign of gamma = -lambda^2 is -sign(L+ u, u)
  for (const auto& g : group(e.values, real_pos)) {
    const Inertia in = group_signature(sp, u, g);
    d.counts.Np_neg += in.n_neg;
    d.counts.Nn_neg += in.n_pos;
  }
  for (const auto& g : group(e.values, imag_pos)) d.counts.Nn_pos += group_signature(sp, u, g).n_neg;
  d.counts.N_real = d.counts.Np_neg + d.counts.Nn_neg;
  d.counts.N_comp = d.counts.Nc_plus;
  d.counts.N_imag_neg = d.counts.Nn_pos;
  return d;
}

DirectReport direct_vortex(const OperatorPair& ops, double lambda_tol) {
  ops.validate();
  const Mat s = fold_weights(ops.Lp, ops.weights);
  const Eigen::Index n = s.rows() / 2;
  Mat m = s;
  m.bottomRows(n) *= -1.0;
  const la::Eig e = la::general_eig(m, true);

  DirectReport d;
  d.lambda = -cplx(0, 1) * e.values;  // lambda = -i mu
  d.fields = {"N_real", "N_comp", "N_imag_neg", "Nn_pos", "Nc_plus"};
  const auto idx = outside_zero(e.values, lambda_tol, d.zero_cluster);
  d.symmetry_error = symmetry_error(e.values, idx, false);
  d.max_offzero_real = max_real(d.lambda, idx);

  std::vector<Eigen::Index> real_mu;
  for (auto i : idx) {
    const cplx mu = e.values(i);
    if (is_real_l(mu))
      real_mu.push_back(i);
    else if (is_imag_l(mu))
      ++d.counts.N_real;
    else if (mu.imag() > 0)
      ++d.counts.N_comp;
  }
  for (const auto& g : group(e.values, real_mu)) d.counts.N_imag_neg += group_signature(s, e.vectors, g).n_neg;
  d.counts.Nn_pos = d.counts.N_imag_neg;
  d.counts.Nc_plus = d.counts.N_comp;
  return d;
}

double vortex_pairing_error(const wave::Profile& p, int n) {
  if (n < 1) throw ConfigError("vortex_pairing_error: n must be positive");
  const OperatorPair plus = wave::vortex_mode_operators(p, n);
  // H_-n assembled directly: the (n+m) and (n-m) components trade places.
  const Eigen::Index nn = plus.dim() / 2;
  Mat hm = plus.Lp;
  hm.topLeftCorner(nn, nn) = plus.Lp.bottomRightCorner(nn, nn);
  hm.bottomRightCorner(nn, nn) = plus.Lp.topLeftCorner(nn, nn);
  OperatorPair minus = plus;
  minus.Lp = hm;

  auto spectrum = [](const OperatorPair& o) {
    Mat s = fold_weights(o.Lp, o.weights);
    s.bottomRows(s.rows() / 2) *= -1.0;
    return std::pair{la::general_eig(s, false).values, la::norm2(s)};
  };
  const auto [a, na] = spectrum(plus);
  const auto [b, nb] = spectrum(minus);
  double err = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double best = INFINITY;
    for (Eigen::Index j = 0; j < b.size(); ++j) best = std::min(best, std::abs(a(i) + b(j)));
    err = std::max(err, best);
  }
  return err / (1.0 + std::max(na, nb));
}

DirectReport direct_kdv(const wave::KdvOperators& k, double lambda_tol, KdvOrthogonality* orth) {
  const Mat& lm = k.ops.Lm;
  const Mat m = k.D * lm;
  const la::Eig e = la::general_eig(m, true);

  DirectReport d;
  d.lambda = e.values;
  d.fields = {"N_real", "N_comp", "N_imag_neg"};
  const auto idx = outside_zero(e.values, lambda_tol, d.zero_cluster);
  d.symmetry_error = symmetry_error(e.values, idx, true);
  d.max_offzero_real = max_real(e.values, idx);

  KdvOrthogonality o;
  const double nl = la::sym_norm2(lm);
  const CMat lmc = lm.cast<cplx>();
  auto form = [&](const CVec& a, const CVec& b) { return b.dot(lmc * a); };  // (L- a, b)

  std::vector<Eigen::Index> imag_pos;
  for (auto i : idx) {
    const cplx z = e.values(i);
    const CVec& w = e.vectors.col(i);
    const double scale = nl * w.squaredNorm();
    if (is_real_l(z)) {
      if (z.real() > 0) ++d.counts.N_real;
      const CVec wr = w.real().cast<cplx>();
      const CVec rw = k.reflection.cast<cplx>().cwiseProduct(wr);
      const cplx rho = form(rw, wr);
      const CVec wp = wr + rw, wm = wr - rw;
      const double err = std::max({std::abs(form(wp, wp) - 2.0 * rho), std::abs(form(wm, wm) + 2.0 * rho),
                                   std::abs(form(wm, wp)), std::abs(form(wr, wr))});
      o.max_error = std::max(o.max_error, err / (nl * wr.squaredNorm()));
      ++o.real_checked;
    } else if (is_imag_l(z)) {
      if (z.imag() > 0) imag_pos.push_back(i);
      const double rho = form(w, w).real();
      const CVec wp = w + w.conjugate(), wm = w - w.conjugate();
      const double err = std::max({std::abs(form(wp, wp) - 2.0 * rho), std::abs(form(wm, wm) - 2.0 * rho),
                                   std::abs(form(wm, wp)), std::abs((w.transpose() * lmc * w)(0, 0))});
      o.max_error = std::max(o.max_error, err / scale);
      ++o.imag_checked;
    } else if (z.real() > 0 && z.imag() > 0) {
      ++d.counts.N_comp;
    }
  }
  for (const auto& g : group(e.values, imag_pos)) d.counts.N_imag_neg += group_signature(lm, e.vectors, g).n_neg;
  if (orth) *orth = o;
  return d;
}

const std::vector<std::string>& counter_names() {
  static const std::vector<std::string> names = {
      "Np_neg", "Np_zero", "Np_pos", "Nn_neg", "Nn_zero", "Nn_pos", "Nc_plus", "Nc_minus", "Np_emb", "Nn_emb",
      "dim_HK_neg", "dim_HAdK_neg", "N_A", "N_K", "N_real", "N_comp", "N_imag_neg", "N_zero_neg"};
  return names;
}

int counter_value(const CountReport& r, const std::string& name) {
  static const std::vector<std::pair<std::string, int CountReport::*>> table = {
      {"Np_neg", &CountReport::Np_neg},         {"Np_zero", &CountReport::Np_zero},
      {"Np_pos", &CountReport::Np_pos},         {"Nn_neg", &CountReport::Nn_neg},
      {"Nn_zero", &CountReport::Nn_zero},       {"Nn_pos", &CountReport::Nn_pos},
      {"Nc_plus", &CountReport::Nc_plus},       {"Nc_minus", &CountReport::Nc_minus},
      {"Np_emb", &CountReport::Np_emb},         {"Nn_emb", &CountReport::Nn_emb},
      {"dim_HK_neg", &CountReport::dim_HK_neg}, {"dim_HAdK_neg", &CountReport::dim_HAdK_neg},
      {"N_A", &CountReport::N_A},               {"N_K", &CountReport::N_K},
      {"N_real", &CountReport::N_real},         {"N_comp", &CountReport::N_comp},
      {"N_imag_neg", &CountReport::N_imag_neg}, {"N_zero_neg", &CountReport::N_zero_neg}};
  for (const auto& [n, ptr] : table)
    if (n == name) return r.*ptr;
  throw std::invalid_argument("unknown counter " + name);
}

std::vector<CounterDiff> pencil_vs_direct(const CountReport& pencil, const DirectReport& direct) {
  std::vector<CounterDiff> diff;
  for (const auto& f : direct.fields) {
    const int a = counter_value(pencil, f), b = counter_value(direct.counts, f);
    if (a != b) diff.push_back({f, a, b});
  }
  return diff;
}

// --- random pencils

namespace {

Mat random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = nd(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  // sign fix so the distribution does not depend on the QR convention
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

double cond_sym(const Mat& k) {
  const Vec ev = la::sym_eig(k, false).values.cwiseAbs();
  return ev.maxCoeff() / ev.minCoeff();
}

struct Block {
  Mat J, P;
};

RandomPencil canonical(const RandomPencilSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ug(-3.0, 3.0), us(0.5, 2.0);
  std::uniform_int_distribution<int> coin(0, 1);
  const int n = spec.dim;
  std::vector<Block> blocks;
  std::vector<double> taken;
  int planted_neg = 0, used = 0;
  for (const auto& j : spec.jordan) {
    if (j.length < 1 || (j.sign != 1 && j.sign != -1))
      throw ConfigError("random_pencil: chain length must be >= 1 and sign +-1");
    const int l = j.length;
    Block b{Mat::Zero(l, l), Mat::Zero(l, l)};
    for (int i = 0; i < l; ++i) {
      b.J(i, i) = j.gamma0;
      if (i + 1 < l) b.J(i, i + 1) = 1.0;
      b.P(i, l - 1 - i) = j.sign;
    }
    planted_neg += l % 2 == 0 ? l / 2 : (j.sign < 0 ? (l + 1) / 2 : (l - 1) / 2);
    used += l;
    taken.push_back(j.gamma0);
    blocks.push_back(std::move(b));
  }
  for (const cplx& z : spec.complex_pairs) {
    if (z.imag() <= 0) throw ConfigError("random_pencil: complex pair needs Im > 0");
    Block b{Mat(2, 2), Mat(2, 2)};
    b.J << z.real(), z.imag(), -z.imag(), z.real();
    b.P << 0, 1, 1, 0;
    planted_neg += 1;
    used += 2;
    blocks.push_back(std::move(b));
  }
  if (used > n) throw ConfigError("random_pencil: planted structure needs more than dim dimensions");
  const int free = n - used;
  int need_neg = -1;
  if (spec.k_negative >= 0) {
    need_neg = spec.k_negative - planted_neg;
    if (need_neg < 0 || need_neg > free) throw ConfigError("random_pencil: requested inertia of K is infeasible");
  }
  std::vector<double> planted;
  std::vector<int> signs(free);
  for (int i = 0; i < free; ++i) signs[i] = need_neg >= 0 ? (i < need_neg ? -1 : 1) : (coin(rng) ? 1 : -1);
  if (need_neg >= 0) std::shuffle(signs.begin(), signs.end(), rng);
  for (int i = 0; i < free; ++i) {
    double g;
    do {
      g = ug(rng);
    } while (std::any_of(taken.begin(), taken.end(), [&](double t) { return std::abs(t - g) < 0.05; }));
    taken.push_back(g);
    planted.push_back(g);
    Block b{Mat::Constant(1, 1, g), Mat::Constant(1, 1, signs[i])};
    blocks.push_back(std::move(b));
  }

  Mat J = Mat::Zero(n, n), P = Mat::Zero(n, n);
  int off = 0;
  for (const auto& b : blocks) {
    const auto l = b.J.rows();
    J.block(off, off, l, l) = b.J;
    P.block(off, off, l, l) = b.P;
    off += static_cast<int>(l);
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mat u = random_orthogonal(n, rng), v = random_orthogonal(n, rng);
    Vec s(n);
    for (int i = 0; i < n; ++i) s(i) = us(rng);
    const Mat sinv = v.transpose() * s.cwiseInverse().asDiagonal() * u.transpose();  // S = U diag(s) V
    const Mat k = sinv.transpose() * P * sinv;
    if (cond_sym(la::symmetrize(k)) > 1e6) continue;
    const Mat a = sinv.transpose() * (P * J) * sinv;
    Pencil pen{SymMatrix(a), SymMatrix(k)};
    const int kappa = inertia(pen.K(), 1e-12).n_neg;
    return RandomPencil{std::move(pen), kappa, planted};
  }
  throw NumericalError("random_pencil: could not draw a well-conditioned K");
}

RandomPencil generic(const RandomPencilSpec& spec, std::mt19937_64& rng) {
  if (!spec.jordan.empty() || !spec.complex_pairs.empty())
    throw ConfigError("random_pencil: planted structure needs the canonical construction");
  const int n = spec.dim;
  std::uniform_int_distribution<int> coin(0, 1), pick(0, n);
  std::normal_distribution<double> nd;
  const int kneg = spec.k_negative >= 0 ? spec.k_negative : pick(rng);
  if (kneg > n) throw ConfigError("random_pencil: requested inertia of K is infeasible");
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mat q = random_orthogonal(n, rng);
    Vec d = Vec::Ones(n);
    d.head(kneg).setConstant(-1.0);
    const Mat k = q.transpose() * d.asDiagonal() * q;
    if (cond_sym(la::symmetrize(k)) > 1e6) continue;
    Mat s(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) s(i, j) = nd(rng);
    s = la::symmetrize(s);
    const Mat mm = k.partialPivLu().solve(s);  // [M x, y] = [x, M y]
    return RandomPencil{Pencil(SymMatrix(k * mm), SymMatrix(k)), kneg, {}};
  }
  throw NumericalError("random_pencil: could not draw a well-conditioned K");
}

}  // namespace

RandomPencil random_pencil(const RandomPencilSpec& spec, std::uint64_t seed) {
  if (spec.dim < 1) throw ConfigError("random_pencil: dim must be positive");
  if (spec.k_negative > spec.dim) throw ConfigError("random_pencil: requested inertia of K is infeasible");
  std::mt19937_64 rng(seed);
  return spec.canonical ? canonical(spec, rng) : generic(spec, rng);
}

RouteCounts route_counts(const Spectrum& spec, double zero_tol) {
  RouteCounts c;
  for (const auto& pt : spec.points) {
    if (!pt.is_real()) {
      if (pt.gamma.imag() > 0) c.complex_upper += pt.alg_mult;
      continue;
    }
    const double g = pt.gamma.real();
    (g < -zero_tol ? c.neg : g <= zero_tol ? c.zero : c.pos) += pt.alg_mult;
  }
  return c;
}

RouteCounts qz_route_counts(const Pencil& p, double zero_tol, double cluster_tol) {
  const la::GenEig ge = la::generalized_eig(p.A().mat(), p.K().mat(), false);
  const Eigen::Index n = ge.alpha.size();
  CVec g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ge.beta(i) == 0.0) throw NumericalError("qz_route_counts: infinite eigenvalue, K is singular");
    g(i) = ge.alpha(i) / ge.beta(i);
  }
  // Defective points scatter by eps^(1/len); cluster, then classify the cluster mean.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(g(i) - g(j)) <= cluster_tol * (1 + std::abs(g(i)))) parent[find(int(i))] = find(int(j));
  std::vector<cplx> sum(n, 0.0);
  std::vector<int> cnt(n, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    sum[find(int(i))] += g(i);
    ++cnt[find(int(i))];
  }
  RouteCounts c;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cnt[i] == 0) continue;
    const cplx mean = sum[i] / double(cnt[i]);
    if (std::abs(mean.imag()) > 1e-8 * (1 + std::abs(mean))) {
      if (mean.imag() > 0) c.complex_upper += cnt[i];
      continue;
    }
    (mean.real() < -zero_tol ? c.neg : mean.real() <= zero_tol ? c.zero : c.pos) += cnt[i];
  }
  return c;
}

// --- profile oracles

namespace {

struct Rhs {
  int m;
  double omega;
  // phi'' = -phi'/r + m^2 phi / r^2 + omega phi - phi^3 + phi^5
  std::array<double, 2> operator()(double r, const std::array<double, 2>& y) const {
    const double p = y[0], q = y[1];
    return {q, -q / r + m * m * p / (r * r) + omega * p - p * p * p + p * p * p * p * p};
  }
};

void rk4_step(const Rhs& f, double r, std::array<double, 2>& y, double h) {
  auto add = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double s) {
    return std::array<double, 2>{a[0] + s * b[0], a[1] + s * b[1]};
  };
  const auto k1 = f(r, y);
  const auto k2 = f(r + h / 2, add(y, k1, h / 2));
  const auto k3 = f(r + h / 2, add(y, k2, h / 2));
  const auto k4 = f(r + h, add(y, k3, h));
  y[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
  y[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
}

constexpr double kR0 = 1e-3;

std::array<double, 2> start(int m, double omega, double a) {
  // phi = a r^m (1 + c r^2), c = omega / (4 (m + 1))
  const double c = omega / (4.0 * (m + 1));
  const double rm = std::pow(kR0, m);
  return {a * rm * (1 + c * kR0 * kR0), a * (m * rm / kR0 + (m + 2) * c * rm * kR0)};
}

// -1: phi crosses zero, +1: phi turns back up (or blows up), 0: neither before r_end.
int classify(const Rhs& f, double a, double r_end, double dr) {
  auto y = start(f.m, f.omega, a);
  double r = kR0;
  bool descending = false;
  while (r < r_end) {
    rk4_step(f, r, y, dr);
    r += dr;
    if (y[0] < 0) return -1;
    if (y[0] > 10) return 1;
    if (y[1] < 0) descending = true;
    if (descending && y[1] > 0) return 1;
  }
  return 0;
}

}  // namespace

ShootingResult vortex_shooting(int m, double omega, double r_end, double dr) {
  if (m < 1 || !(omega > 0)) throw ConfigError("vortex_shooting: needs m >= 1 and omega > 0");
  const Rhs f{m, omega};
  // scan for the first sign change of the classification
  double lo = 0, hi = 0;
  int clo = 0;
  double prev = 1e-3;
  int cprev = classify(f, prev, r_end, dr);
  for (int i = 1; i <= 400; ++i) {
    const double a = 1e-3 * std::pow(10.0, 5.0 * i / 400.0);
    const int c = classify(f, a, r_end, dr);
    if (c != 0 && cprev != 0 && c != cprev) {
      lo = prev;
      hi = a;
      clo = cprev;
      break;
    }
    prev = a;
    cprev = c;
  }
  if (hi == 0) throw NumericalError("vortex_shooting: no bracket found for the initial slope");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int c = classify(f, mid, r_end, dr);
    if (c == clo || c == 0)
      lo = mid;
    else
      hi = mid;
  }

  ShootingResult out;
  out.a = 0.5 * (lo + hi);
  auto ylo = start(m, omega, lo), yhi = start(m, omega, hi);
  std::vector<double> rs, ps;
  double r = kR0;
  while (r < r_end) {
    rk4_step(f, r, ylo, dr);
    rk4_step(f, r, yhi, dr);
    r += dr;
    const double p = 0.5 * (ylo[0] + yhi[0]);
    if (p > out.max_value) {
      out.max_value = p;
      out.argmax = r;
    }
    if (std::abs(ylo[0] - yhi[0]) > 1e-8 * std::max(out.max_value, 1e-300) || ylo[0] < 0 || yhi[0] < 0) break;
    rs.push_back(r);
    ps.push_back(p);
    out.r_valid = r;
  }
  out.r = Eigen::Map<Vec>(rs.data(), static_cast<Eigen::Index>(rs.size()));
  out.phi = Eigen::Map<Vec>(ps.data(), static_cast<Eigen::Index>(ps.size()));
  return out;
}

Vec kdv_petviashvili(const wave::KdvCoeffs& co, double c, const wave::Grid1D& g, int max_iter) {
  if (co.b2 != 0.0 || co.b3 != 0.0) throw ConfigError("kdv_petviashvili: only the Kawahara case b2 = b3 = 0");
  if (co.b1 == 0.0) throw ConfigError("kdv_petviashvili: b1 must be nonzero");
  const int n = g.n_points;
  const Vec x = g.x();
  const double two_pi = 2.0 * std::numbers::pi;
  CMat fwd(n, n);  // DFT with the grid offset folded in
  Vec sym(n);
  for (int j = 0; j < n; ++j) {
    const int kk = j <= n / 2 ? j : j - n;
    const double k = std::numbers::pi * kk / g.half_length;
    sym(j) = co.a1 + c + co.a2 * k * k + co.a3 * k * k * k * k;
    for (int l = 0; l < n; ++l) fwd(j, l) = std::polar(1.0, -two_pi * j * l / n);
  }
  if ((sym.array() <= 0).any()) throw ConfigError("kdv_petviashvili: linear symbol must be positive");
  const CMat inv = fwd.adjoint() / double(n);

  // (a1 + c) phi - a2 phi'' + a3 phi'''' = -3/2 b1 phi^2
  Vec phi = x.unaryExpr([&](double t) {
    const double s = 1.0 / std::cosh(std::sqrt(c) * t / 2.0);
    return -(c / co.b1) * s * s;
  });
  for (int it = 0; it < max_iter; ++it) {
    const CVec ph = fwd * phi.cast<cplx>();
    const Vec nl = -1.5 * co.b1 * phi.array().square();
    const CVec nh = fwd * nl.cast<cplx>();
    const double num = (sym.array() * ph.array().abs2()).sum();
    const double den = (ph.conjugate().array() * nh.array()).sum().real();
    if (den == 0.0) throw NumericalError("kdv_petviashvili: iteration collapsed to zero");
    const double s = num / den;
    const Vec next = (inv * (s * s * nh.array() / sym.array().cast<cplx>()).matrix()).real();
    const double change = (next - phi).norm();
    phi = next;
    if (change <= 1e-13 * phi.norm() && std::abs(s - 1.0) < 1e-12) return phi;
  }
  throw NumericalError("kdv_petviashvili: no convergence");
}

}  // namespace kc::oracle
