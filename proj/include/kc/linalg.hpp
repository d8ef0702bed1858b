#pragma once

#include <Eigen/Dense>
#include <complex>

namespace kc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

namespace la {

struct SymEig {
  Vec values;  // ascending
  Mat vectors;
};

// Symmetric eigendecomposition (LAPACK dsyevd). Only the lower triangle is read.
SymEig sym_eig(const Mat& m, bool want_vectors = true);

struct Eig {
  CVec values;
  CMat vectors;   // unit 2-norm columns
  double abnrm = 0.0;  // 1-norm of the balanced matrix
};

// Nonsymmetric eigendecomposition with scaling + permutation balancing (LAPACK dgeevx).
Eig general_eig(const Mat& m, bool want_vectors = true);

struct GenEig {
  CVec alpha;
  Vec beta;
  CMat vectors;
};

// QZ route for A x = lambda B x (LAPACK dggev).
GenEig generalized_eig(const Mat& a, const Mat& b, bool want_vectors = false);

Vec singular_values(const Mat& m);
Vec singular_values(const CMat& m);
double norm2(const Mat& m);
double sym_norm2(const Mat& m);

// Orthonormal basis of the numerical null space: singular values <= rel_tol * sigma_max.
// The count is at least min_dim when min_dim > 0 (smallest singular directions are taken).
Mat null_space(const Mat& m, double rel_tol, int min_dim = 0);
CMat null_space(const CMat& m, double rel_tol, int min_dim = 0);

// Columns spanning the orthogonal complement of span(v) (v has orthonormal columns).
Mat orthonormal_complement(const Mat& v, Eigen::Index n);

Mat symmetrize(const Mat& m);

}  // namespace la
}  // namespace kc
