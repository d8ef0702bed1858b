// Built with -mavx2 -mfma. Only reached through dispatch after a CPUID check.
#include <immintrin.h>

#include "kc/simd.hpp"

namespace kc::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wdot(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    s0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), s0);
  }
  double s = hsum(s0);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double bilinear(const double* m, std::size_t ld, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += y[j] * dot(x, m + j * ld, n);
  return s;
}

void stencil_apply(const double* c, int hw, const double* diag, const double* x, double* y,
                   std::size_t n) {
  const long nn = static_cast<long>(n);
  auto edge = [&](long i) {
    double s = diag[i] * x[i];
    for (int k = 1; k <= hw; ++k) {
      const double l = i - k >= 0 ? x[i - k] : 0.0;
      const double r = i + k < nn ? x[i + k] : 0.0;
      s += c[k] * (l + r);
    }
    y[i] = s;
  };
  const long lo = hw;
  const long hi = nn - hw;
  long i = 0;
  for (; i < lo && i < nn; ++i) edge(i);
  for (; i + 4 <= hi; i += 4) {
    __m256d s = _mm256_mul_pd(_mm256_loadu_pd(diag + i), _mm256_loadu_pd(x + i));
    for (int k = 1; k <= hw; ++k) {
      __m256d pair = _mm256_add_pd(_mm256_loadu_pd(x + i - k), _mm256_loadu_pd(x + i + k));
      s = _mm256_fmadd_pd(_mm256_set1_pd(c[k]), pair, s);
    }
    _mm256_storeu_pd(y + i, s);
  }
  for (; i < nn; ++i) edge(i);
}

void moments24(const double* x, std::size_t n, double& s2, double& s4) {
  __m256d a2 = _mm256_setzero_pd();
  __m256d a4 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d q = _mm256_mul_pd(v, v);
    a2 = _mm256_add_pd(a2, q);
    a4 = _mm256_fmadd_pd(q, q, a4);
  }
  s2 = hsum(a2);
  s4 = hsum(a4);
  for (; i < n; ++i) {
    const double q = x[i] * x[i];
    s2 += q;
    s4 += q * q;
  }
}

}  // namespace kc::simd::avx2
