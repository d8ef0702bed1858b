#include "kc/pencil_core.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kc/errors.hpp"
#include "kc/simd.hpp"

namespace kc {

SymMatrix::SymMatrix(const Mat& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) throw NumericalError("SymMatrix: need a nonempty square matrix");
  const double nrm = m.norm();
  asym_ = nrm > 0.0 ? (m - m.transpose()).norm() / nrm : 0.0;
  m_ = la::symmetrize(m);
}

Inertia inertia_from_values(const Vec& ev, double zero_tol) {
  Inertia in;
  if (ev.size() == 0) return in;
  const double scale = ev.cwiseAbs().maxCoeff();
  const double cut = zero_tol * scale;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -cut)
      ++in.n_neg;
    else if (ev(i) > cut)
      ++in.n_pos;
    else
      ++in.n_zero;
  }
  return in;
}

Inertia inertia(const SymMatrix& m, double zero_tol) {
  return inertia_from_values(la::sym_eig(m.mat(), false).values, zero_tol);
}

Pencil::Pencil(SymMatrix a, SymMatrix k, double omega_plus, double omega_minus)
    : a_(std::move(a)), k_(std::move(k)), omega_plus_(omega_plus), omega_minus_(omega_minus) {
  if (a_.dim() != k_.dim()) throw NumericalError("Pencil: A and K have different sizes");
  if (!(omega_minus_ > 0.0) || !(omega_plus_ >= 0.0))
    throw NumericalError("Pencil: need omega_minus > 0 and omega_plus >= 0");
  const Vec sk = la::singular_values(k_.mat());
  norm_k_ = sk(0);
  if (!(sk(sk.size() - 1) > 1e-10 * sk(0))) {
    std::ostringstream os;
    os << "Pencil: K is numerically singular (sigma_min/sigma_max = " << sk(sk.size() - 1) / sk(0) << ")";
    throw NumericalError(os.str());
  }
  norm_a_ = la::sym_norm2(a_.mat());
}

void Pencil::set_inverse_metric(const Mat& m) {
  if (m.rows() != dim() || m.cols() != dim()) throw NumericalError("Pencil: inverse metric has the wrong size");
  const double err = (m * k_.mat() - Mat::Identity(dim(), dim())).norm();
  if (err > 1e-6 * std::sqrt(static_cast<double>(dim()))) {
    std::ostringstream os;
    os << "Pencil: inverse metric does not invert K (||M K - I||_F = " << err << ")";
    throw NumericalError(os.str());
  }
  k_inv_ = la::symmetrize(m);
}

Mat Pencil::solve_metric(const Mat& b) const {
  if (has_inverse_metric()) return k_inv_ * b;
  Eigen::PartialPivLU<Mat> lu(k_.mat());
  return lu.solve(b);
}

cplx kform(const Mat& k, const CVec& f, const CVec& g) { return g.dot(k * f); }

double kform(const Mat& k, const Vec& f, const Vec& g) {
  return simd::bilinear(k.data(), static_cast<std::size_t>(k.rows()), g.data(), f.data(),
                        static_cast<std::size_t>(f.size()));
}

namespace {

struct Cluster {
  std::vector<Eigen::Index> idx;
  cplx mean;
};

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

cplx mean_of(const CVec& vals, const std::vector<Eigen::Index>& idx) {
  cplx s = 0.0;
  for (auto i : idx) s += vals(i);
  return s / static_cast<double>(idx.size());
}

std::vector<Cluster> link(const CVec& vals, const std::vector<Cluster>& in,
                          const std::function<bool(const Cluster&, const Cluster&)>& near) {
  const int m = static_cast<int>(in.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (near(in[i], in[j])) parent[find_root(parent, i)] = find_root(parent, j);
  std::vector<std::vector<int>> groups(m);
  for (int i = 0; i < m; ++i) groups[find_root(parent, i)].push_back(i);
  std::vector<Cluster> out;
  for (auto& g : groups) {
    if (g.empty()) continue;
    Cluster c;
    for (int i : g) c.idx.insert(c.idx.end(), in[i].idx.begin(), in[i].idx.end());
    std::sort(c.idx.begin(), c.idx.end());
    c.mean = mean_of(vals, c.idx);
    out.push_back(std::move(c));
  }
  return out;
}

Mat real_shift(const Pencil& p, double g) { return p.A().mat() - g * p.K().mat(); }
CMat complex_shift(const Pencil& p, cplx g) {
  return p.A().mat().cast<cplx>() - g * p.K().mat().cast<cplx>();
}

// Smallest singular value of A - gK relative to the largest, and the number below tol.
std::pair<double, int> shift_rank_gap(const Pencil& p, cplx g, double tol) {
  Vec sv = g.imag() == 0.0 ? la::singular_values(real_shift(p, g.real()))
                           : la::singular_values(complex_shift(p, g));
  int nz = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= tol * sv(0)) ++nz;
  return {sv(sv.size() - 1) / sv(0), nz};
}

// Second pass: a defective eigenvalue computed in floating point scatters by
// roughly eps^(1/n), which can exceed cluster_tol for n >= 3. Groups within
// merge_radius are merged only if their eigenvectors are nearly collinear and
// the mean is a numerical eigenvalue with a rank drop smaller than the group size.
std::vector<Cluster> merge_defective(const Pencil& p, const la::Eig& eig, std::vector<Cluster> cl,
                                     const SolveOptions& opt) {
  auto near = [&](const Cluster& a, const Cluster& b) {
    const double s = 1.0 + std::max(std::abs(a.mean), std::abs(b.mean));
    return std::abs(a.mean - b.mean) <= opt.merge_radius * s;
  };
  std::vector<Cluster> cand = link(eig.values, cl, near);
  if (cand.size() == cl.size()) return cl;

  std::vector<Cluster> out;
  for (auto& c : cand) {
    // which original clusters went in
    std::vector<Cluster> parts;
    for (auto& o : cl)
      if (std::find(c.idx.begin(), c.idx.end(), o.idx.front()) != c.idx.end()) parts.push_back(o);
    if (parts.size() == 1) {
      out.push_back(parts.front());
      continue;
    }
    CMat v(eig.vectors.rows(), static_cast<Eigen::Index>(c.idx.size()));
    for (std::size_t j = 0; j < c.idx.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(c.idx[j]);
    const Vec sv = la::singular_values(v);
    int vrank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-3 * sv(0)) ++vrank;
    bool accept = vrank < static_cast<int>(c.idx.size());
    if (accept) {
      cplx g = c.mean;
      if (std::abs(g.imag()) <= opt.cluster_tol * (1.0 + std::abs(g))) g = g.real();
      auto [gap, nz] = shift_rank_gap(p, g, opt.geom_tol);
      accept = gap <= opt.geom_tol && nz < static_cast<int>(c.idx.size());
    }
    if (accept)
      out.push_back(std::move(c));
    else
      out.insert(out.end(), parts.begin(), parts.end());
  }
  return out;
}

Vec realify(const CVec& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const cplx phase = std::conj(v(k)) / std::abs(v(k));
  Vec r = (v * phase).real();
  return r / r.norm();
}

double point_residual(const Pencil& p, const EigenPoint& pt) {
  double r = 0.0;
  const CMat a = p.A().mat().cast<cplx>();
  const CMat k = p.K().mat().cast<cplx>();
  for (Eigen::Index j = 0; j < pt.chain.cols(); ++j) {
    const CVec f = pt.chain.col(j);
    CVec res = a * f - pt.gamma * (k * f);
    if (pt.is_defective() && j > 0) res -= k * pt.chain.col(j - 1);
    r = std::max(r, res.norm() / f.norm());
  }
  return r;
}

bool point_less(const EigenPoint& a, const EigenPoint& b) {
  if (a.gamma.real() != b.gamma.real()) return a.gamma.real() < b.gamma.real();
  return a.gamma.imag() < b.gamma.imag();
}

}  // namespace

Spectrum solve_pencil(const Pencil& p, const SolveOptions& opt) {
  const Eigen::Index n = p.dim();
  const Mat m = p.solve_metric(p.A().mat());
  const la::Eig eig = la::general_eig(m, true);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(eig.values(i).real()) || !std::isfinite(eig.values(i).imag()))
      throw NumericalError("solve_pencil: non-finite eigenvalue from dgeevx");

  std::vector<Cluster> singles(n);
  for (Eigen::Index i = 0; i < n; ++i) singles[i] = Cluster{{i}, eig.values(i)};
  auto tight = [&](const Cluster& a, const Cluster& b) {
    const double s = 1.0 + std::max(std::abs(a.mean), std::abs(b.mean));
    return std::abs(a.mean - b.mean) <= opt.cluster_tol * s;
  };
  std::vector<Cluster> cl = link(eig.values, singles, tight);
  cl = merge_defective(p, eig, std::move(cl), opt);

  for (auto& c : cl)
    if (std::abs(c.mean.imag()) <= opt.cluster_tol * (1.0 + std::abs(c.mean))) c.mean = c.mean.real();

  std::vector<Cluster*> upper, lower;
  std::vector<Cluster*> reals;
  for (auto& c : cl) {
    if (c.mean.imag() > 0)
      upper.push_back(&c);
    else if (c.mean.imag() < 0)
      lower.push_back(&c);
    else
      reals.push_back(&c);
  }
  if (upper.size() != lower.size())
    throw NumericalError("solve_pencil: complex eigenvalues do not pair into conjugates");
  std::vector<Cluster*> partner(upper.size(), nullptr);
  std::vector<bool> used(lower.size(), false);
  for (std::size_t i = 0; i < upper.size(); ++i) {
    double best = INFINITY;
    std::size_t bj = 0;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(lower[j]->mean - std::conj(upper[i]->mean));
      if (d < best) {
        best = d;
        bj = j;
      }
    }
    if (lower[bj]->idx.size() != upper[i]->idx.size() ||
        best > opt.merge_radius * (1.0 + std::abs(upper[i]->mean)))
      throw NumericalError("solve_pencil: conjugate partner mismatch");
    used[bj] = true;
    partner[i] = lower[bj];
  }

  Spectrum spec;
  spec.total_dim = static_cast<int>(n);
  spec.solver_tol = opt.cluster_tol;

  auto make_point = [&](const Cluster& c, cplx g) {
    EigenPoint pt;
    pt.gamma = g;
    pt.alg_mult = static_cast<int>(c.idx.size());
    if (pt.alg_mult == 1) {
      const CVec v = eig.vectors.col(c.idx.front());
      pt.chain = g.imag() == 0.0 ? CMat(realify(v).cast<cplx>()) : CMat(v / v.norm());
    } else if (g.imag() == 0.0) {
      pt.chain = la::null_space(real_shift(p, g.real()), opt.geom_tol, 1).cast<cplx>();
    } else {
      pt.chain = la::null_space(complex_shift(p, g), opt.geom_tol, 1);
    }
    if (pt.chain.cols() > pt.alg_mult) pt.chain = pt.chain.rightCols(pt.alg_mult).eval();
    pt.geom_mult = static_cast<int>(pt.chain.cols());
    pt.chain_complete = !pt.is_defective();
    pt.is_embedded = g.imag() == 0.0 && p.band_edge() < Pencil::kNoBand && g.real() >= p.band_edge();
    return pt;
  };

  for (auto* c : reals) spec.points.push_back(make_point(*c, c->mean));
  for (std::size_t i = 0; i < upper.size(); ++i) {
    EigenPoint up = make_point(*upper[i], upper[i]->mean);
    EigenPoint lo = up;
    lo.gamma = std::conj(up.gamma);
    lo.chain = up.chain.conjugate();
    spec.points.push_back(std::move(up));
    spec.points.push_back(std::move(lo));
  }
  std::sort(spec.points.begin(), spec.points.end(), point_less);
  for (auto& pt : spec.points) {
    pt.residual = point_residual(p, pt);
    spec.residual = std::max(spec.residual, pt.residual);
  }
  return spec;
}

namespace {

template <class M, class V>
void extend_chain(const M& shift, const M& k, V f1, int n, double tol, std::vector<V>& out,
                  double& worst) {
  Eigen::BDCSVD<M> svd(shift, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Eigen::Index r = s.size() - 1;  // one-dimensional eigenspace
  const double nrm_m = s(0);
  const double nrm_k = la::singular_values(Mat(k.real()))(0);
  out.clear();
  out.push_back(f1);
  worst = 0.0;
  for (int j = 1; j < n; ++j) {
    const V rhs = k * out.back();
    V coeff = svd.matrixU().leftCols(r).adjoint() * rhs;
    for (Eigen::Index i = 0; i < r; ++i) coeff(i) /= s(i);
    V fj = svd.matrixV().leftCols(r) * coeff;
    const double res = (shift * fj - rhs).norm() / (nrm_m * fj.norm() + nrm_k * out.back().norm());
    worst = std::max(worst, res);
    if (res > tol) {
      std::ostringstream os;
      os << "jordan_chain: solve for f_" << j + 1 << " left relative residual " << res;
      throw NumericalError(os.str());
    }
    out.push_back(std::move(fj));
  }
}

}  // namespace

EigenPoint jordan_chain(const Pencil& p, const EigenPoint& point, const SolveOptions& opt) {
  EigenPoint out = point;
  if (!point.is_defective()) {
    out.chain_complete = true;
    return out;
  }
  if (point.geom_mult > 1) {
    std::ostringstream os;
    os << "jordan_chain: gamma = " << point.gamma << " has alg_mult " << point.alg_mult << " and geom_mult "
       << point.geom_mult << "; count rules need a single chain";
    throw UnsupportedStructure(os.str());
  }
  const int n = point.alg_mult;
  double worst = 0.0;
  if (point.is_real()) {
    std::vector<Vec> ch;
    Vec f1 = point.chain.col(0).real();
    f1.normalize();
    extend_chain<Mat, Vec>(real_shift(p, point.gamma.real()), p.K().mat(), f1, n, opt.chain_tol, ch, worst);
    out.chain.resize(p.dim(), n);
    for (int j = 0; j < n; ++j) out.chain.col(j) = ch[j].cast<cplx>();
    out.top_product = kform(p.K().mat(), ch.back(), ch.front());
  } else {
    std::vector<CVec> ch;
    CVec f1 = point.chain.col(0).normalized();
    extend_chain<CMat, CVec>(complex_shift(p, point.gamma), p.K().mat().cast<cplx>(), f1, n, opt.chain_tol, ch,
                             worst);
    out.chain.resize(p.dim(), n);
    for (int j = 0; j < n; ++j) out.chain.col(j) = ch[j];
    out.top_product = kform(p.K().mat(), ch.back(), ch.front()).real();
  }
  out.chain_complete = true;
  out.residual = std::max(point_residual(p, out), worst);
  return out;
}

Spectrum krein_classify(const Pencil& p, Spectrum spec, const SolveOptions& opt) {
  const Mat& k = p.K().mat();
  const double nk = p.norm_K();
  spec.residual = 0.0;
  for (auto& pt : spec.points) {
    if (!pt.is_real()) {
      pt.krein_np = pt.alg_mult;
      pt.krein_nn = pt.alg_mult;
    } else if (pt.is_defective()) {
      if (!pt.chain_complete) pt = jordan_chain(p, pt, opt);
      const Vec f1 = pt.chain.col(0).real();
      const Vec fn = pt.chain.col(pt.alg_mult - 1).real();
      const double s = kform(k, fn, f1);
      pt.top_product = s;
      if (std::abs(s) <= opt.gram_tol * nk * f1.norm() * fn.norm()) {
        std::ostringstream os;
        os << "krein_classify: [f1, fn] vanishes on the chain at gamma = " << pt.gamma.real();
        throw TheoremViolation(os.str());
      }
      const int half = pt.alg_mult / 2;
      if (pt.alg_mult % 2 == 0) {
        pt.krein_np = half;
        pt.krein_nn = half;
      } else {
        pt.krein_np = s > 0 ? half + 1 : half;
        pt.krein_nn = s > 0 ? half : half + 1;
      }
    } else {
      const Mat f = pt.chain.real();
      const Eigen::Index m = f.cols();
      Mat g(m, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) g(i, j) = g(j, i) = kform(k, Vec(f.col(i)), Vec(f.col(j)));
      if (m == 1) pt.top_product = g(0, 0);
      const Vec ev = la::sym_eig(g, false).values;
      int pos = 0, neg = 0, zero = 0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double cut = opt.gram_tol * nk;
        if (ev(i) > cut)
          ++pos;
        else if (ev(i) < -cut)
          ++neg;
        else
          ++zero;
      }
      if (zero > 0 && !pt.is_embedded) {
        std::ostringstream os;
        os << "krein_classify: neutral direction in the eigenspace of isolated gamma = " << pt.gamma.real();
        throw TheoremViolation(os.str());
      }
      pt.krein_np = pos + zero;
      pt.krein_nn = neg + zero;
    }
    spec.residual = std::max(spec.residual, pt.residual);
  }
  return spec;
}

Spectrum analyze_pencil(const Pencil& p, const SolveOptions& opt) {
  Spectrum s = solve_pencil(p, opt);
  for (auto& pt : s.points)
    if (pt.is_defective()) pt = jordan_chain(p, pt, opt);
  return krein_classify(p, std::move(s), opt);
}

}  // namespace kc
