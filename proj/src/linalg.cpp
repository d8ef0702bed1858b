#include "kc/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

#include "kc/errors.hpp"

namespace kc::la {

namespace {

void check_info(lapack_int info, const char* routine, Eigen::Index n) {
  if (info == 0) return;
  std::string msg = std::string(routine) + " failed (info=" + std::to_string(info) +
                    ", n=" + std::to_string(n) + ")";
  if (info > 0) msg += ": iteration did not converge";
  throw NumericalError(msg);
}

}  // namespace

SymEig sym_eig(const Mat& m, bool want_vectors) {
  const auto n = m.rows();
  if (m.cols() != n) throw NumericalError("sym_eig: matrix is not square");
  SymEig out;
  out.values.resize(n);
  if (n == 0) return out;
  Mat a = m;
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L',
                                   static_cast<lapack_int>(n), a.data(), static_cast<lapack_int>(n),
                                   out.values.data());
  if (info != 0) {
    const Vec sv = singular_values(m);
    throw NumericalError("dsyevd failed (info=" + std::to_string(info) + "), cond estimate " +
                         std::to_string(sv(0) / std::max(sv(sv.size() - 1), 1e-300)));
  }
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

Eig general_eig(const Mat& m, bool want_vectors) {
  const auto n = m.rows();
  Eig out;
  out.values.resize(n);
  if (n == 0) return out;
  Mat a = m;
  const auto ln = static_cast<lapack_int>(n);
  std::vector<double> wr(n), wi(n), scale(n), rconde(n), rcondv(n);
  Mat vr(want_vectors ? n : 1, want_vectors ? n : 1);
  lapack_int ilo = 0, ihi = 0;
  double abnrm = 0.0;
  lapack_int info = LAPACKE_dgeevx(LAPACK_COL_MAJOR, 'B', 'N', want_vectors ? 'V' : 'N', 'N', ln,
                                   a.data(), ln, wr.data(), wi.data(), nullptr, ln, vr.data(),
                                   want_vectors ? ln : 1, &ilo, &ihi, scale.data(), &abnrm,
                                   rconde.data(), rcondv.data());
  check_info(info, "dgeevx", n);
  out.abnrm = abnrm;
  for (Eigen::Index i = 0; i < n; ++i) out.values(i) = cplx(wr[i], wi[i]);
  if (!want_vectors) return out;
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (wi[j] == 0.0) {
      out.vectors.col(j) = vr.col(j).cast<cplx>();
    } else {
      // conjugate pair stored as (re, im) in columns j, j+1
      CVec v = vr.col(j).cast<cplx>() + cplx(0, 1) * vr.col(j + 1).cast<cplx>();
      out.vectors.col(j) = v;
      out.vectors.col(j + 1) = v.conjugate();
      ++j;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) out.vectors.col(j).normalize();
  return out;
}

GenEig generalized_eig(const Mat& a_in, const Mat& b_in, bool want_vectors) {
  const auto n = a_in.rows();
  GenEig out;
  out.alpha.resize(n);
  out.beta.resize(n);
  if (n == 0) return out;
  Mat a = a_in, b = b_in;
  const auto ln = static_cast<lapack_int>(n);
  std::vector<double> ar(n), ai(n);
  Mat vr(want_vectors ? n : 1, want_vectors ? n : 1);
  lapack_int info =
      LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', ln, a.data(), ln, b.data(), ln,
                    ar.data(), ai.data(), out.beta.data(), nullptr, ln, vr.data(),
                    want_vectors ? ln : 1);
  check_info(info, "dggev", n);
  for (Eigen::Index i = 0; i < n; ++i) out.alpha(i) = cplx(ar[i], ai[i]);
  if (!want_vectors) return out;
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (ai[j] == 0.0) {
      out.vectors.col(j) = vr.col(j).cast<cplx>();
    } else {
      CVec v = vr.col(j).cast<cplx>() + cplx(0, 1) * vr.col(j + 1).cast<cplx>();
      out.vectors.col(j) = v;
      out.vectors.col(j + 1) = v.conjugate();
      ++j;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) out.vectors.col(j).normalize();
  return out;
}

namespace {

struct Svd {
  Vec s;
  Mat v;  // right singular vectors as columns
};

Svd svd_real(const Mat& m, bool want_v) {
  const auto r = m.rows(), c = m.cols();
  Svd out;
  const auto k = std::min(r, c);
  out.s.resize(k);
  if (k == 0) return out;
  Mat a = m;
  Mat u(want_v ? r : 1, want_v ? r : 1);
  Mat vt(want_v ? c : 1, want_v ? c : 1);
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, want_v ? 'A' : 'N', static_cast<lapack_int>(r),
                                   static_cast<lapack_int>(c), a.data(), static_cast<lapack_int>(r),
                                   out.s.data(), u.data(), want_v ? static_cast<lapack_int>(r) : 1,
                                   vt.data(), want_v ? static_cast<lapack_int>(c) : 1);
  if (want_v && info == 0) out.v = vt.transpose();
  if (info != 0) {
    // dgesdd occasionally fails to converge where the one-sided Jacobi SVD does not
    Eigen::JacobiSVD<Mat> js(m, want_v ? Eigen::ComputeFullV : 0);
    out.s = js.singularValues();
    if (want_v) out.v = js.matrixV();
  }
  return out;
}

}  // namespace

Vec singular_values(const Mat& m) { return svd_real(m, false).s; }

Vec singular_values(const CMat& m) {
  if (m.size() == 0) return Vec();
  Eigen::BDCSVD<CMat> svd(m);
  return svd.singularValues();
}

double norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

double sym_norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  const Vec ev = sym_eig(m, false).values;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Mat null_space(const Mat& m, double rel_tol, int min_dim) {
  const auto c = m.cols();
  Svd s = svd_real(m, true);
  const double smax = s.s.size() ? s.s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.s.size(); ++i)
    if (s.s(i) > rel_tol * smax) ++rank;
  Eigen::Index nd = c - rank;
  if (nd < min_dim) nd = std::min<Eigen::Index>(min_dim, c);
  return s.v.rightCols(nd);
}

CMat null_space(const CMat& m, double rel_tol, int min_dim) {
  const auto c = m.cols();
  Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * smax) ++rank;
  Eigen::Index nd = c - rank;
  if (nd < min_dim) nd = std::min<Eigen::Index>(min_dim, c);
  return svd.matrixV().rightCols(nd);
}

Mat orthonormal_complement(const Mat& v, Eigen::Index n) {
  if (v.cols() == 0) return Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr(v);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - v.cols());
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace kc::la
