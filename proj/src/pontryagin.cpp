#include "kc/pontryagin.hpp"

#include <random>
#include <sstream>

#include "kc/errors.hpp"

namespace kc {

MetricSplit metric_split(const SymMatrix& k) {
  MetricSplit m;
  m.K = k.mat();
  const la::SymEig e = la::sym_eig(m.K, true);
  const Inertia in = inertia_from_values(e.values, 1e-12);
  if (in.n_zero != 0) throw NumericalError("metric_split: K has a numerical kernel");
  m.kappa = in.n_neg;
  m.P_minus = e.vectors.leftCols(in.n_neg);
  m.P_plus = e.vectors.rightCols(in.n_pos);
  m.lam_minus = e.values.head(in.n_neg);
  m.lam_plus = e.values.tail(in.n_pos);
  return m;
}

Subspace::Subspace(CMat basis) : basis_(std::move(basis)) {
  if (basis_.cols() == 0) return;
  const Vec sv = la::singular_values(basis_);
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) {
    std::ostringstream os;
    os << "Subspace: basis is rank deficient (sigma_min/sigma_max = " << sv(sv.size() - 1) / sv(0) << ")";
    throw NumericalError(os.str());
  }
}

Inertia gram_signature(const Subspace& s, const MetricSplit& m, double tol) {
  Inertia in;
  if (s.dim() == 0) return in;
  CMat b = s.basis();
  for (Eigen::Index j = 0; j < b.cols(); ++j) b.col(j).normalize();
  const CMat g = b.adjoint() * m.K.cast<cplx>() * b;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
  const double nk = std::max(m.lam_minus.size() ? -m.lam_minus(0) : 0.0,
                             m.lam_plus.size() ? m.lam_plus(m.lam_plus.size() - 1) : 0.0);
  const Vec& ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol * nk)
      ++in.n_neg;
    else if (ev(i) > tol * nk)
      ++in.n_pos;
    else
      ++in.n_zero;
  }
  return in;
}

namespace {

Mat shifted_T(const Pencil& p, double delta) {
  const Mat ad = p.A().mat() + delta * p.K().mat();
  Eigen::PartialPivLU<Mat> lu(ad);
  return lu.solve(p.K().mat());
}

// Two steps of shifted inverse iteration sharpen eigenvectors taken from the K^-1 A route.
Mat refine_real(const Pencil& p, double gamma, const Mat& f) {
  const double s = gamma + 1e-10 * (1.0 + std::abs(gamma));
  Eigen::PartialPivLU<Mat> lu(p.A().mat() - s * p.K().mat());
  Mat x = f;
  for (int it = 0; it < 2; ++it) {
    x = lu.solve(p.K().mat() * x);
    Eigen::HouseholderQR<Mat> qr(x);
    x = qr.householderQ() * Mat::Identity(x.rows(), x.cols());
  }
  return x;
}

}  // namespace

double invariance_residual(const Pencil& p, double delta, const CMat& basis) {
  if (basis.cols() == 0) return 0.0;
  const Mat t = shifted_T(p, delta);
  Eigen::HouseholderQR<CMat> qr(basis);
  const CMat q = qr.householderQ() * CMat::Identity(basis.rows(), basis.cols());
  const CMat tq = t.cast<cplx>() * q;
  const CMat c = q.adjoint() * tq;
  return (tq - q * c).norm() / la::norm2(t);
}

NonpositiveSubspace maximal_nonpositive_subspace(const Pencil& p, const Spectrum& spec, double delta,
                                                 double gram_tol) {
  const MetricSplit ms = metric_split(p.K());
  const Mat& k = p.K().mat();
  std::vector<CVec> cols;
  for (const auto& pt : spec.points) {
    if (!pt.classified()) throw NumericalError("maximal_nonpositive_subspace: spectrum is not classified");
    if (pt.is_real()) {
      if (pt.krein_nn == 0) continue;
      if (pt.is_defective()) {
        // leading chain vectors span the neutral part; the count rule picks how many
        for (int j = 0; j < pt.krein_nn; ++j) cols.push_back(pt.chain.col(j));
      } else {
        const Mat f = refine_real(p, pt.gamma.real(), pt.chain.real());
        const Mat g = f.transpose() * k * f;
        const la::SymEig e = la::sym_eig(la::symmetrize(g), true);
        for (int j = 0; j < pt.krein_nn; ++j) cols.push_back((f * e.vectors.col(j)).cast<cplx>());
      }
    } else if (pt.gamma.imag() > 0) {
      if (pt.is_defective() && !pt.chain_complete)
        throw NumericalError("maximal_nonpositive_subspace: complex chain missing");
      for (Eigen::Index j = 0; j < pt.chain.cols(); ++j) cols.push_back(pt.chain.col(j));
    }
  }
  if (static_cast<int>(cols.size()) != ms.kappa) {
    std::ostringstream os;
    os << "maximal_nonpositive_subspace: assembled dimension " << cols.size() << " but kappa = " << ms.kappa;
    throw TheoremViolation(os.str());
  }
  CMat b(p.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = cols[j];

  NonpositiveSubspace out;
  out.subspace = Subspace(std::move(b));
  out.kappa = ms.kappa;
  out.gram = gram_signature(out.subspace, ms, gram_tol);
  out.invariance_residual = invariance_residual(p, delta, out.subspace.basis());
  return out;
}

double cayley_isometry_residual(const Pencil& p, double delta, cplx z, int trial_count, std::uint64_t seed) {
  if (!(z.imag() > 0)) throw NumericalError("cayley_isometry_residual: need Im z > 0");
  const Eigen::Index n = p.dim();
  const Mat t = shifted_T(p, delta);
  const la::Eig e = la::general_eig(t, false);
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(e.values(i) - z) <= 1e-8) throw NumericalError("cayley_isometry_residual: z is in the spectrum of T");

  const CMat tc = t.cast<cplx>();
  Eigen::PartialPivLU<CMat> lu(tc - z * CMat::Identity(n, n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CMat g(n, trial_count);
  for (Eigen::Index j = 0; j < trial_count; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = cplx(nd(rng), nd(rng));
  const CMat y = lu.solve(g);
  const CMat ug = tc * y - std::conj(z) * y;
  const CMat kc = p.K().mat().cast<cplx>();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < trial_count; ++j) {
    const double before = g.col(j).dot(kc * g.col(j)).real();
    const double after = ug.col(j).dot(kc * ug.col(j)).real();
    worst = std::max(worst, std::abs(after - before) / (g.col(j).squaredNorm() * p.norm_K()));
  }
  return worst;
}

double contraction_witness(const Subspace& s, const MetricSplit& m) {
  if (s.dim() != m.kappa) throw NumericalError("contraction_witness: subspace dimension differs from kappa");
  if (m.kappa == 0) return 0.0;
  const CMat ym = m.lam_minus.cwiseAbs().cwiseSqrt().asDiagonal() * (m.P_minus.transpose().cast<cplx>() * s.basis());
  const CMat yp = m.lam_plus.cwiseSqrt().asDiagonal() * (m.P_plus.transpose().cast<cplx>() * s.basis());
  const Vec sv = la::singular_values(ym);
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0)))
    throw NumericalError("contraction_witness: projection onto the negative part is rank deficient");
  const CMat c = yp * ym.inverse();
  if (c.size() == 0) return 0.0;
  return la::singular_values(c)(0);
}

}  // namespace kc
