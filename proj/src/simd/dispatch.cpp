#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "kc/simd.hpp"

namespace kc::simd {

namespace {

Isa detect() {
  const char* env = std::getenv("KC_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(KC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) throw std::runtime_error("avx2 not available on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

#ifdef KC_HAVE_AVX2
#define KC_DISPATCH(fn, ...) \
  return active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define KC_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) { KC_DISPATCH(dot, a, b, n); }

double wdot(const double* w, const double* a, const double* b, std::size_t n) {
  KC_DISPATCH(wdot, w, a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) { KC_DISPATCH(axpy, alpha, x, y, n); }

double bilinear(const double* m, std::size_t ld, const double* x, const double* y, std::size_t n) {
  KC_DISPATCH(bilinear, m, ld, x, y, n);
}

void stencil_apply(const double* c, int hw, const double* diag, const double* x, double* y,
                   std::size_t n) {
  KC_DISPATCH(stencil_apply, c, hw, diag, x, y, n);
}

void moments24(const double* x, std::size_t n, double& s2, double& s4) {
  KC_DISPATCH(moments24, x, n, s2, s4);
}

#undef KC_DISPATCH

}  // namespace kc::simd
