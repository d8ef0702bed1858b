#pragma once

#include <cstddef>

// Small dense kernels with a scalar reference path and an AVX2+FMA path.
// The active path is chosen once at startup from CPUID; KC_SIMD=scalar forces
// the reference path.

namespace kc::simd {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);
// Test hook. Passing avx2 on a machine without it throws.
void force_isa(Isa isa);
bool avx2_available();

double dot(const double* a, const double* b, std::size_t n);
double wdot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
// x^T M y for column-major n x n M with leading dimension ld.
double bilinear(const double* m, std::size_t ld, const double* x, const double* y, std::size_t n);
// y[i] = diag[i] * x[i] + sum_{k=1..hw} c[k] * (x[i-k] + x[i+k]), zero outside [0, n).
void stencil_apply(const double* c, int hw, const double* diag, const double* x, double* y,
                   std::size_t n);
// s2 = sum x^2, s4 = sum x^4.
void moments24(const double* x, std::size_t n, double& s2, double& s4);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double wdot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double bilinear(const double* m, std::size_t ld, const double* x, const double* y, std::size_t n);
void stencil_apply(const double* c, int hw, const double* diag, const double* x, double* y,
                   std::size_t n);
void moments24(const double* x, std::size_t n, double& s2, double& s4);
}  // namespace scalar

#ifdef KC_HAVE_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double wdot(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double bilinear(const double* m, std::size_t ld, const double* x, const double* y, std::size_t n);
void stencil_apply(const double* c, int hw, const double* diag, const double* x, double* y,
                   std::size_t n);
void moments24(const double* x, std::size_t n, double& s2, double& s4);
}  // namespace avx2
#endif

}  // namespace kc::simd
