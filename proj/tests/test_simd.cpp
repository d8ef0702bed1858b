#include <random>
#include <vector>

#include "doctest.h"
#include "kc/simd.hpp"

using namespace kc;

namespace {

std::vector<double> randv(std::size_t n, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double close(double a, double b, double scale) { return std::abs(a - b) <= 1e-13 * std::max(1.0, scale); }

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("dispatch can be forced to the reference path") {
  const simd::Isa before = simd::active_isa();
  simd::force_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  CHECK(std::string(simd::isa_name(simd::Isa::scalar)) == "scalar");
  if (!simd::avx2_available()) CHECK_THROWS(simd::force_isa(simd::Isa::avx2));
  simd::force_isa(before);
}

#ifdef KC_HAVE_AVX2
TEST_CASE("AVX2 kernels match the scalar kernels") {
  if (!simd::avx2_available()) return;
  std::mt19937_64 rng(17);
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67, 250}) {
    CAPTURE(n);
    const auto a = randv(n, rng), b = randv(n, rng), w = randv(n, rng, 0.1, 2.0);
    const double s = static_cast<double>(n);
    CHECK(close(simd::scalar::dot(a.data(), b.data(), n), simd::avx2::dot(a.data(), b.data(), n), s));
    CHECK(close(simd::scalar::wdot(w.data(), a.data(), b.data(), n), simd::avx2::wdot(w.data(), a.data(), b.data(), n), s));

    auto y1 = b, y2 = b;
    simd::scalar::axpy(0.37, a.data(), y1.data(), n);
    simd::avx2::axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1.0));

    const std::size_t ld = n + 3;
    const auto m = randv(ld * n, rng);
    CHECK(close(simd::scalar::bilinear(m.data(), ld, a.data(), b.data(), n),
                simd::avx2::bilinear(m.data(), ld, a.data(), b.data(), n), s * s));

    const double c[] = {0.0, -4.0 / 3.0, 1.0 / 12.0};
    const auto diag = randv(n, rng);
    std::vector<double> z1(n), z2(n);
    simd::scalar::stencil_apply(c, 2, diag.data(), a.data(), z1.data(), n);
    simd::avx2::stencil_apply(c, 2, diag.data(), a.data(), z2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(z1[i], z2[i], 4.0));

    double s2a, s4a, s2b, s4b;
    simd::scalar::moments24(a.data(), n, s2a, s4a);
    simd::avx2::moments24(a.data(), n, s2b, s4b);
    CHECK(close(s2a, s2b, s));
    CHECK(close(s4a, s4b, s));
  }
}
#endif

TEST_CASE("reference kernels") {
  const double a[] = {1, 2, 3, 4, 5};
  const double b[] = {2, 0, -1, 1, 0.5};
  CHECK(simd::dot(a, b, 5) == doctest::Approx(5.5));
  const double w[] = {1, 1, 2, 2, 0};
  CHECK(simd::wdot(w, a, b, 5) == doctest::Approx(4.0));
  double s2, s4;
  simd::moments24(a, 5, s2, s4);
  CHECK(s2 == 55);
  CHECK(s4 == 979);
  // y = diag x + c1 (x[i-1] + x[i+1]) with zero ends
  const double c[] = {0, -1};
  const double d[] = {2, 2, 2, 2, 2};
  double y[5];
  simd::stencil_apply(c, 1, d, a, y, 5);
  CHECK(y[0] == 0);
  CHECK(y[2] == 0);
  CHECK(y[4] == 6);
  const double m[] = {1, 0, 0, 2};  // column-major diag(1, 2)
  CHECK(simd::bilinear(m, 2, a, b, 2) == doctest::Approx(2.0));
}

}  // TEST_SUITE
