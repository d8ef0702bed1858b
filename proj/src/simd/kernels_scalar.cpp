#include "kc/simd.hpp"

namespace kc::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wdot(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double bilinear(const double* m, std::size_t ld, const double* x, const double* y, std::size_t n) {
  // column j contributes y[j] * (x . M[:, j])
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += y[j] * dot(x, m + j * ld, n);
  return s;
}

void stencil_apply(const double* c, int hw, const double* diag, const double* x, double* y,
                   std::size_t n) {
  const long nn = static_cast<long>(n);
  for (long i = 0; i < nn; ++i) {
    double s = diag[i] * x[i];
    for (int k = 1; k <= hw; ++k) {
      const double l = i - k >= 0 ? x[i - k] : 0.0;
      const double r = i + k < nn ? x[i + k] : 0.0;
      s += c[k] * (l + r);
    }
    y[i] = s;
  }
}

void moments24(const double* x, std::size_t n, double& s2, double& s4) {
  s2 = 0.0;
  s4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = x[i] * x[i];
    s2 += q;
    s4 += q * q;
  }
}

}  // namespace kc::simd::scalar
