#include "kc/constrained.hpp"

#include <cmath>
#include <sstream>

#include "kc/errors.hpp"

namespace kc {

void OperatorPair::validate(double rel_tol) const {
  if (Lp.rows() != Lp.cols() || Lm.rows() != Lm.cols() || Lp.rows() != Lm.rows() || Lp.rows() == 0)
    throw NumericalError("OperatorPair: L+ and L- must be square and the same size");
  auto check = [&](const Mat& l, const char* name) {
    Mat wl = l;
    if (weights) {
      if (weights->size() != l.rows() || (weights->array() <= 0).any())
        throw NumericalError("OperatorPair: weights must be positive and match the operator size");
      wl = weights->asDiagonal() * l;
    }
    const double asym = (wl - wl.transpose()).norm();
    if (asym > rel_tol * wl.norm()) {
      std::ostringstream os;
      os << "OperatorPair: " << name << " fails the weighted symmetry check (" << asym / wl.norm() << ")";
      throw NumericalError(os.str());
    }
  };
  check(Lp, "L+");
  check(Lm, "L-");
}

Mat fold_weights(const Mat& l, const std::optional<Vec>& weights) {
  if (!weights) return la::symmetrize(l);
  const Vec s = weights->cwiseSqrt();
  return la::symmetrize(s.asDiagonal() * l * s.cwiseInverse().asDiagonal());
}

Mat kernel_basis(const Mat& l, const std::optional<Vec>& weights, double tol) {
  const Mat s = fold_weights(l, weights);
  const la::SymEig e = la::sym_eig(s, true);
  const double nrm = e.values.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (std::abs(e.values(i)) <= tol * nrm) keep.push_back(i);
  Mat v(l.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = e.vectors.col(keep[j]);
  if (weights) v = weights->cwiseSqrt().cwiseInverse().asDiagonal() * v;
  return v;
}

Mat ProjectedPencil::projector() const {
  const Eigen::Index n = sqrt_w.size();
  return Mat::Identity(n, n) - sqrt_w.cwiseInverse().asDiagonal() * kernel * kernel.transpose() * sqrt_w.asDiagonal();
}

namespace {

ProjectedPencil build(const OperatorPair& ops, double tol) {
  ops.validate();
  const Eigen::Index n = ops.dim();
  Vec sw = ops.weights ? Vec(ops.weights->cwiseSqrt()) : Vec::Ones(n);
  Mat sp = fold_weights(ops.Lp, ops.weights);
  Mat sm = fold_weights(ops.Lm, ops.weights);

  const la::SymEig em = la::sym_eig(sm, true);
  const double nm = em.values.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> ker;
  double gap = INFINITY;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(em.values(i));
    if (a <= tol * nm) {
      ker.push_back(i);
    } else {
      if (a <= 10.0 * tol * nm) {
        std::ostringstream os;
        os << "project_pencil: L- eigenvalue " << em.values(i) << " is in the ambiguous band ("
           << tol * nm << ", " << 10 * tol * nm << "]";
        throw NumericalError(os.str());
      }
      gap = std::min(gap, a / nm);
    }
  }
  Mat v(n, static_cast<Eigen::Index>(ker.size()));
  for (std::size_t j = 0; j < ker.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = em.vectors.col(ker[j]);
  if (static_cast<Eigen::Index>(ker.size()) == n) throw NumericalError("project_pencil: L- vanishes identically");
  const Mat q = la::orthonormal_complement(v, n);
  const Mat a = la::symmetrize(q.transpose() * sp * q);
  const Mat mm = la::symmetrize(q.transpose() * sm * q);
  const Eigen::Index h = q.cols();
  Eigen::PartialPivLU<Mat> lu(mm);
  const Mat k = la::symmetrize(lu.solve(Mat::Identity(h, h)));

  const Vec ep = la::sym_eig(sp, false).values;
  Pencil pencil(SymMatrix(a), SymMatrix(k), ops.omega_plus, ops.omega_minus);
  pencil.set_inverse_metric(mm);
  ProjectedPencil out{std::move(pencil),
                      q, v, std::move(sp), std::move(sm), std::move(sw),
                      inertia_from_values(ep, tol), inertia_from_values(em.values, tol), gap};
  return out;
}

}  // namespace

ProjectedPencil project_pencil(const OperatorPair& ops, double tol) { return build(ops, tol); }

DeltaChoice select_delta(const Pencil& p, const Spectrum& spec, double zero_tol) {
  DeltaChoice d;
  double best_neg = -INFINITY;
  double min_abs_re = INFINITY;
  for (const auto& pt : spec.points) {
    const double re = pt.gamma.real();
    if (pt.is_real() && re < -zero_tol) best_neg = std::max(best_neg, re);
    if (std::abs(pt.gamma) > zero_tol && std::abs(re) > zero_tol) min_abs_re = std::min(min_abs_re, std::abs(re));
  }
  if (std::isfinite(best_neg)) {
    d.sigma_neg1 = best_neg;
    d.delta = -best_neg / 2.0;
    d.delta_alt = -best_neg / 4.0;
  } else if (std::isfinite(min_abs_re)) {
    d.fallback = true;
    d.delta = min_abs_re / 2.0;
    d.delta_alt = min_abs_re / 4.0;
  } else {
    // only the zero class: any shift on the scale of |A| / |K| leaves A + delta K nonsingular
    d.fallback = true;
    const double na = std::max(p.A().mat().cwiseAbs().maxCoeff(), 1.0);
    const double nk = std::max(p.K().mat().cwiseAbs().maxCoeff(), 1e-300);
    d.delta = 0.5 * na / nk;
    d.delta_alt = d.delta / 2.0;
  }
  for (double dl : {d.delta, d.delta_alt}) {
    const Vec ev = la::sym_eig(p.A().mat() + dl * p.K().mat(), false).values;
    const double mx = ev.cwiseAbs().maxCoeff();
    if (!(ev.cwiseAbs().minCoeff() > 1e-14 * mx)) {
      std::ostringstream os;
      os << "select_delta: A + delta K is singular at delta = " << dl;
      throw NumericalError(os.str());
    }
  }
  return d;
}

double default_mu(const OperatorPair& ops, double kernel_tol) {
  const Vec ev = la::sym_eig(fold_weights(ops.Lp, ops.weights), false).values;
  const double nrm = ev.cwiseAbs().maxCoeff();
  // stay well inside the gap when the continuum of L+ reaches down to zero
  double gap = INFINITY;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > kernel_tol * nrm) gap = std::min(gap, std::abs(ev(i)));
  return -std::min(1e-6 * nrm, 1e-3 * gap);
}

Mat constrained_index_matrix(const OperatorPair& ops, double mu, double kernel_tol) {
  const Mat v0 = kernel_basis(ops.Lm, ops.weights, kernel_tol);
  if (v0.cols() == 0) return Mat(0, 0);
  const Vec sw = ops.weights ? Vec(ops.weights->cwiseSqrt()) : Vec::Ones(ops.dim());
  const Mat v = sw.asDiagonal() * v0;  // folded, Euclidean-orthonormal
  const Mat sp = fold_weights(ops.Lp, ops.weights);
  const Vec ev = la::sym_eig(sp, false).values;
  const double dist = (ev.array() - mu).abs().minCoeff();
  if (dist <= 1e-8) {
    std::ostringstream os;
    os << "constrained_index_matrix: mu = " << mu << " is within " << dist << " of the spectrum of L+";
    throw NumericalError(os.str());
  }
  const Eigen::Index n = sp.rows();
  Eigen::PartialPivLU<Mat> lu(mu * Mat::Identity(n, n) - sp);
  return la::symmetrize(v.transpose() * lu.solve(v));
}

void proposition1_indices(const OperatorPair& ops, const ProjectedPencil& pp, double kernel_tol,
                          ConstrainedIndices& out, double overlap_tol) {
  out.mu = default_mu(ops, kernel_tol);
  const Mat am = constrained_index_matrix(ops, out.mu, kernel_tol);
  out.n0 = 0;
  out.z1 = 0;
  if (am.rows() > 0) {
    const Vec ev = la::sym_eig(am, false).values;
    const Vec evp = la::sym_eig(pp.Sp, false).values;
    const double scale = 1.0 / (evp.array() - out.mu).abs().minCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) >= -1e-8 * scale) ++out.n0;
      if (std::abs(ev(i)) <= 1e-8 * scale) ++out.z1;
    }
  }
  // kernel directions of L+ that stick out of H
  const Mat up = pp.sqrt_w.asDiagonal() * kernel_basis(ops.Lp, ops.weights, kernel_tol);
  out.z0 = 0;
  if (up.cols() > 0 && pp.kernel.cols() > 0) {
    const Vec sv = la::singular_values(Mat(pp.kernel.transpose() * up));
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > overlap_tol) ++out.z0;
  }
  out.inertia_A = inertia(pp.pencil.A(), kernel_tol);
  out.predicted_neg_A = pp.inertia_Lp.n_neg - out.n0;
  out.predicted_zero_A = pp.inertia_Lp.n_zero - out.z0 + out.z1;
  out.pos_A_bound = pp.inertia_Lp.n_pos + out.n0 + out.z0 - out.z1;
  out.prop1_consistent = out.inertia_A.n_neg == out.predicted_neg_A &&
                         out.inertia_A.n_zero == out.predicted_zero_A && out.inertia_A.n_pos <= out.pos_A_bound;
}

ZeroSplit zero_splitting(const Pencil& p, const Spectrum& spec, double delta, double zero_tol,
                         double inertia_tol) {
  ZeroSplit z;
  const Mat& k = p.K().mat();
  for (const auto& pt : spec.points) {
    if (!pt.is_real() || std::abs(pt.gamma.real()) > zero_tol) continue;
    if (pt.is_defective()) {
      const double s = pt.top_product;
      if (std::abs(s) <= 1e-8 * p.norm_K()) throw TheoremViolation("zero_splitting: degenerate zero chain");
      const bool odd = pt.alg_mult % 2 == 1;
      const bool positive = (odd && s > 0) || (!odd && s < 0);
      (positive ? z.n_plus : z.n_minus) += pt.geom_mult;
    } else {
      const Mat f = pt.chain.real();
      const Vec g = la::sym_eig(la::symmetrize(f.transpose() * k * f), false).values;
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (std::abs(g(i)) <= 1e-8 * p.norm_K()) throw TheoremViolation("zero_splitting: neutral zero eigenvector");
        (g(i) > 0 ? z.n_plus : z.n_minus) += 1;
      }
    }
  }
  const Inertia a = inertia(p.A(), inertia_tol);
  const Inertia ad = inertia(SymMatrix(p.A().mat() + delta * k), inertia_tol);
  z.direct_minus = ad.n_neg - a.n_neg;
  z.direct_plus = ad.n_pos - a.n_pos;
  z.consistent = z.n_minus == z.direct_minus && z.n_plus == z.direct_plus && z.n_minus + z.n_plus == a.n_zero;
  return z;
}

}  // namespace kc
