#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "kc/constrained.hpp"
#include "kc/errors.hpp"
#include "kc/wave_operators.hpp"

using namespace kc;
using kct::mat2;
using kct::pencil2;

namespace {

OperatorPair toy_pair() {
  OperatorPair ops;
  ops.Lp = mat2(5, 0, 0, 7);
  ops.Lm = mat2(0, 0, 0, 1);
  ops.omega_plus = 1.0;
  ops.omega_minus = 1.0;
  return ops;
}

}  // namespace

TEST_SUITE("constrained") {

TEST_CASE("kernel basis") {
  CHECK(kernel_basis(Mat::Identity(3, 3), std::nullopt, 1e-9).cols() == 0);
  Vec d(3);
  d << 0, 1, 2;
  const Mat k = kernel_basis(d.asDiagonal(), std::nullopt, 1e-9);
  REQUIRE(k.cols() == 1);
  CHECK(std::abs(std::abs(k(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("hand compression of a 2x2 pair") {
  const ProjectedPencil pp = project_pencil(toy_pair(), 1e-10);
  REQUIRE(pp.pencil.dim() == 1);
  CHECK(pp.pencil.A()(0, 0) == doctest::Approx(7.0));
  CHECK(pp.pencil.K()(0, 0) == doctest::Approx(1.0));
  const Mat a = constrained_index_matrix(toy_pair(), -0.001, 1e-10);
  REQUIRE(a.rows() == 1);
  CHECK(a(0, 0) == doctest::Approx(1.0 / (-0.001 - 5.0)).epsilon(1e-12));
  ConstrainedIndices ci;
  proposition1_indices(toy_pair(), pp, 1e-10, ci);
  CHECK(ci.n0 == 0);
  CHECK(ci.z0 == 0);
  CHECK(ci.z1 == 0);
}

TEST_CASE("empty kernel: the pencil is (L+, L-^-1)") {
  OperatorPair ops;
  ops.Lp = mat2(2, 1, 1, 3);
  ops.Lm = mat2(4, 1, 1, 2);
  const ProjectedPencil pp = project_pencil(ops, 1e-10);
  CHECK(pp.pencil.dim() == 2);
  CHECK((pp.pencil.A().mat() - ops.Lp).norm() < 1e-12);
  CHECK((pp.pencil.K().mat() - ops.Lm.inverse()).norm() < 1e-12);
  CHECK(constrained_index_matrix(ops, -1e-3, 1e-10).size() == 0);
}

TEST_CASE("ambiguous kernel eigenvalue raises") {
  OperatorPair ops;
  ops.Lp = Mat::Identity(3, 3);
  Vec d(3);
  d << 5e-10, 1, 2;  // between tol and 10 tol relative to ||L-|| = 2
  ops.Lm = d.asDiagonal();
  CHECK_THROWS_AS(project_pencil(ops, 1e-10), NumericalError);
}

TEST_CASE("weighted projector is idempotent and W-symmetric") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uw(0.5, 2.0);
  const int n = 8;
  Vec w(n);
  for (int i = 0; i < n; ++i) w(i) = uw(rng);
  // W L- = S with a one-dimensional kernel
  Mat s = kct::random_spd(n, rng);
  const Vec v = Vec::LinSpaced(n, 1, 2);
  s -= (s * v) * (s * v).transpose() / v.dot(s * v);
  OperatorPair ops;
  ops.weights = w;
  ops.Lm = w.cwiseInverse().asDiagonal() * kc::la::symmetrize(s);
  ops.Lp = w.cwiseInverse().asDiagonal() * kct::random_spd(n, rng);
  ops.validate();
  const ProjectedPencil pp = project_pencil(ops, 1e-10);
  CHECK(pp.pencil.dim() == n - 1);
  const Mat p = pp.projector();
  CHECK((p * p - p).norm() <= 1e-12 * n);
  const Mat wd = w.asDiagonal();
  CHECK((wd * p - p.transpose() * wd).norm() <= 1e-12 * n);
  CHECK((p * v).norm() <= 1e-10 * v.norm());
}

TEST_CASE("shift selection") {
  {
    const Pencil p = pencil2(mat2(-1, 0, 0, 1), mat2(1, 0, 0, -1));
    const DeltaChoice d = select_delta(p, analyze_pencil(p), 1e-8);
    REQUIRE(d.sigma_neg1);
    CHECK(*d.sigma_neg1 == doctest::Approx(-1.0));
    CHECK(d.delta == doctest::Approx(0.5));
    CHECK_FALSE(d.fallback);
  }
  {
    const Pencil p = pencil2(mat2(1, 0, 0, 2), Mat::Identity(2, 2));
    const DeltaChoice d = select_delta(p, analyze_pencil(p), 1e-8);
    CHECK_FALSE(d.sigma_neg1);
    CHECK(d.fallback);
    CHECK(d.delta == doctest::Approx(0.5));
  }
  {
    // every eigenvalue in the zero class
    const Pencil p = pencil2(mat2(0, 0, 0, 1), mat2(0, 1, 1, 0));
    const DeltaChoice d = select_delta(p, analyze_pencil(p), 1e-8);
    CHECK(d.delta > 0);
    CHECK(d.delta_alt > 0);
    CHECK(d.delta_alt != d.delta);
  }
}

TEST_CASE("zero splitting rules") {
  {
    const Pencil p = pencil2(mat2(0, 0, 0, 1), Mat::Identity(2, 2));
    const Spectrum s = analyze_pencil(p);
    const ZeroSplit z = zero_splitting(p, s, select_delta(p, s, 1e-8).delta, 1e-8, 1e-10);
    CHECK(z.n_plus == 1);
    CHECK(z.n_minus == 0);
    CHECK(z.consistent);
  }
  {
    const Pencil p = pencil2(mat2(0, 0, 0, 1), mat2(0, 1, 1, 0));
    const Spectrum s = analyze_pencil(p);
    const ZeroSplit z = zero_splitting(p, s, select_delta(p, s, 1e-8).delta, 1e-8, 1e-10);
    CHECK(z.n_minus == 1);
    CHECK(z.n_plus == 0);
    CHECK(z.consistent);
  }
  {
    const Pencil p = pencil2(mat2(1, 0, 0, 2), Mat::Identity(2, 2));
    const Spectrum s = analyze_pencil(p);
    const ZeroSplit z = zero_splitting(p, s, 0.5, 1e-8, 1e-10);
    CHECK(z.n_minus == 0);
    CHECK(z.n_plus == 0);
  }
}

TEST_CASE("cubic soliton: kernel, metric inertia and Proposition 1") {
  const wave::Grid1D g{512, 20.0, wave::GridKind::finite_difference};
  const wave::Profile prof = wave::nls_soliton(1, 1.0, g);
  const OperatorPair ops = wave::nls_operators(prof);
  const Mat ker = kernel_basis(ops.Lm, ops.weights, 1e-6);
  REQUIRE(ker.cols() == 1);
  const Vec phi = prof.values / prof.values.norm();
  CHECK(std::abs(std::abs(ker.col(0).dot(phi)) - 1.0) < 1e-6);
  const ProjectedPencil pp = project_pencil(ops, 1e-6);
  CHECK(inertia(pp.pencil.K(), 1e-8) == Inertia{0, 0, g.n_points - 1});
  CHECK(pp.inertia_Lm.n_neg == 0);

  const Mat a0 = constrained_index_matrix(ops, default_mu(ops, 1e-6), 1e-6);
  REQUIRE(a0.rows() == 1);
  // L+ d(phi)/d(omega) = -phi, so A(0-) = (d(phi)/d(omega), phi) / |phi|^2 = slope / (2 |phi|^2)
  const double expect = prof.slope / (2.0 * prof.values.squaredNorm() * g.h());
  CHECK(a0(0, 0) > 0);
  CHECK(a0(0, 0) == doctest::Approx(expect).epsilon(1e-3));

  ConstrainedIndices ci;
  proposition1_indices(ops, pp, 1e-6, ci, 1e-8);
  CHECK(ci.n0 == 1);
  CHECK(ci.z0 == 0);
  CHECK(ci.z1 == 0);
  const Inertia ia = inertia(pp.pencil.A(), 1e-6);
  CHECK(ia.n_neg == pp.inertia_Lp.n_neg - ci.n0);

  const Spectrum s = analyze_pencil(pp.pencil);
  const DeltaChoice d = select_delta(pp.pencil, s, 1e-6);
  CHECK_FALSE(d.sigma_neg1);
  CHECK(d.fallback);
}

TEST_CASE("supercritical soliton: n0 = 0") {
  const wave::Grid1D g{256, 20.0, wave::GridKind::finite_difference};
  const wave::Profile prof = wave::nls_soliton(3, 1.0, g);
  const OperatorPair ops = wave::nls_operators(prof);
  const ProjectedPencil pp = project_pencil(ops, 1e-6);
  ConstrainedIndices ci;
  proposition1_indices(ops, pp, 1e-6, ci, 1e-8);
  CHECK(prof.slope < 0);
  CHECK(ci.n0 == 0);
  CHECK(inertia(pp.pencil.A(), 1e-6).n_neg == 1);
}

}  // TEST_SUITE
