#include "doctest.h"
#include "helpers.hpp"
#include "kc/errors.hpp"
#include "kc/oracle.hpp"

using namespace kc;

namespace {

CountReport pencil_counts(const OperatorPair& ops, ModelKind m) {
  const ProjectedPencil pp = project_pencil(ops, 1e-6);
  const Spectrum s = analyze_pencil(pp.pencil);
  CountReport r = tally(s, pp.pencil, select_delta(pp.pencil, s, 1e-6).delta, 1e-6, 1e-8);
  fill_lambda_counters(r, m);
  return r;
}

const EigenPoint* find_point(const Spectrum& s, double gamma, int alg) {
  for (const auto& pt : s.points)
    if (pt.is_real() && pt.alg_mult == alg && std::abs(pt.gamma.real() - gamma) < 1e-6) return &pt;
  return nullptr;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("random pencils are reproducible from the seed") {
  for (bool canonical : {true, false}) {
    oracle::RandomPencilSpec spec;
    spec.dim = 7;
    spec.canonical = canonical;
    const oracle::RandomPencil a = oracle::random_pencil(spec, 42), b = oracle::random_pencil(spec, 42),
                               c = oracle::random_pencil(spec, 43);
    CHECK(a.pencil.A().mat() == b.pencil.A().mat());
    CHECK(a.pencil.K().mat() == b.pencil.K().mat());
    CHECK(a.pencil.A().mat() != c.pencil.A().mat());
  }
}

TEST_CASE("infeasible specs are rejected") {
  oracle::RandomPencilSpec spec;
  spec.dim = 2;
  spec.jordan.push_back({0.0, 3, 1});
  CHECK_THROWS_AS(oracle::random_pencil(spec, 1), ConfigError);
  spec.jordan.clear();
  spec.k_negative = 3;
  CHECK_THROWS_AS(oracle::random_pencil(spec, 1), ConfigError);
  spec.k_negative = -1;
  spec.complex_pairs = {cplx(0, 1), cplx(1, 1)};
  spec.dim = 3;
  CHECK_THROWS_AS(oracle::random_pencil(spec, 1), ConfigError);
}

TEST_CASE("two-dimensional Jordan example up to congruence") {
  oracle::RandomPencilSpec spec;
  spec.dim = 2;
  spec.k_negative = 1;
  spec.jordan.push_back({0.0, 2, 1});
  const oracle::RandomPencil rp = oracle::random_pencil(spec, 5);
  CHECK(rp.kappa == 1);
  CHECK(inertia(rp.pencil.K(), 1e-10) == Inertia{1, 0, 1});
  const Spectrum s = analyze_pencil(rp.pencil);
  const EigenPoint* pt = find_point(s, 0.0, 2);
  REQUIRE(pt);
  CHECK(pt->geom_mult == 1);
  CHECK(pt->top_product > 0);
  CHECK(pt->krein_np == 1);
  CHECK(pt->krein_nn == 1);
}

TEST_CASE("planted Jordan blocks round-trip") {
  std::uint64_t seed = 300;
  for (double g0 : {0.0, -1.3, 0.8})
    for (int len : {1, 2, 3})
      for (int sign : {1, -1}) {
        oracle::RandomPencilSpec spec;
        spec.dim = 7;
        spec.jordan.push_back({g0, len, sign});
        const oracle::RandomPencil rp = oracle::random_pencil(spec, ++seed);
        const Spectrum s = analyze_pencil(rp.pencil);
        const EigenPoint* pt = find_point(s, g0, len);
        REQUIRE(pt);
        CHECK(pt->geom_mult == 1);
        CHECK((pt->top_product > 0 ? 1 : -1) == sign);
      }
}

TEST_CASE("the two solver routes agree") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    oracle::RandomPencilSpec spec;
    spec.dim = 2 + static_cast<int>(seed % 9);
    spec.canonical = seed % 3 != 0;
    if (seed % 5 == 0 && spec.dim >= 3) spec.jordan.push_back({0.0, 2 + static_cast<int>(seed % 2), 1});
    if (seed % 5 == 1 && spec.dim >= 2) spec.complex_pairs.push_back(cplx(-0.5, 0.7));
    if (!spec.jordan.empty() || !spec.complex_pairs.empty()) spec.canonical = true;
    if (seed % 7 == 0 && !spec.canonical) spec.k_negative = 0;
    const oracle::RandomPencil rp = oracle::random_pencil(spec, seed);
    const Spectrum s = analyze_pencil(rp.pencil);
    CHECK(oracle::route_counts(s, 1e-8) == oracle::qz_route_counts(rp.pencil, 1e-8));
  }
}

TEST_CASE("positive definite metric keeps every count on the real axis") {
  oracle::RandomPencilSpec spec;
  spec.dim = 9;
  spec.k_negative = 0;
  const oracle::RandomPencil rp = oracle::random_pencil(spec, 77);
  const Spectrum s = analyze_pencil(rp.pencil);
  const oracle::RouteCounts rc = oracle::qz_route_counts(rp.pencil, 1e-8);
  CHECK(rc == oracle::route_counts(s, 1e-8));
  CHECK(rc.complex_upper == 0);
  const Inertia a = inertia(rp.pencil.A(), 1e-10);
  CHECK(rc.neg == a.n_neg);
  CHECK(rc.zero == a.n_zero);
  CHECK(rc.pos == a.n_pos);
}

TEST_CASE("direct linearization of the cubic and supercritical solitons") {
  const wave::Grid1D g{256, 20.0, wave::GridKind::finite_difference};
  // the sigma = 3 soliton is narrow: at 256 points the lattice pins it and the translation pair turns real
  const wave::Grid1D fine{512, 20.0, wave::GridKind::finite_difference};
  const OperatorPair cubic = wave::nls_operators(wave::nls_soliton(1, 1.0, g));
  const OperatorPair super = wave::nls_operators(wave::nls_soliton(3, 1.0, fine));
  const oracle::DirectReport dc = oracle::direct_nls(cubic, 1e-3);
  CHECK(dc.max_offzero_real <= 1e-5);
  CHECK(dc.symmetry_error <= 1e-8);
  CHECK(oracle::pencil_vs_direct(pencil_counts(cubic, ModelKind::nls), dc).empty());

  const oracle::DirectReport ds = oracle::direct_nls(super, 1e-3);
  int unstable = 0, mirrored = 0;
  for (Eigen::Index i = 0; i < ds.lambda.size(); ++i) {
    if (ds.lambda(i).real() > 1e-3) ++unstable;
    if (ds.lambda(i).real() < -1e-3) ++mirrored;
  }
  CHECK(unstable == 1);
  CHECK(mirrored == 1);
  CHECK(ds.symmetry_error <= 1e-8);
  const CountReport ps = pencil_counts(super, ModelKind::nls);
  CHECK(oracle::pencil_vs_direct(ps, ds).empty());

  // pencil and direct eigensolve on different models and grids
  const auto diff = oracle::pencil_vs_direct(ps, dc);
  REQUIRE_FALSE(diff.empty());
  bool named = false;
  for (const auto& d : diff) named = named || d.name == "Np_neg";
  CHECK(named);
}

TEST_CASE("counter names cover the report") {
  CountReport r;
  r.Nc_plus = 3;
  r.N_imag_neg = 2;
  CHECK(oracle::counter_value(r, "Nc_plus") == 3);
  CHECK(oracle::counter_value(r, "N_imag_neg") == 2);
  CHECK(oracle::counter_names().size() == 18);
  CHECK_THROWS(oracle::counter_value(r, "nope"));
}

}  // TEST_SUITE
