#include "kc/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "kc/errors.hpp"
#include "kc/simd.hpp"

namespace kc::cli {

namespace {

json inertia_json(const Inertia& in) { return json{{"n", in.n_neg}, {"z", in.n_zero}, {"p", in.n_pos}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

PontryaginReport pontryagin_checks(const Pencil& p, const Spectrum& spec, double delta, std::uint64_t seed) {
  PontryaginReport r;
  const NonpositiveSubspace s = maximal_nonpositive_subspace(p, spec, delta);
  const MetricSplit ms = metric_split(p.K());
  r.kappa = s.kappa;
  r.dim = s.subspace.dim();
  r.gram = s.gram;
  r.invariance = s.invariance_residual;
  r.contraction = contraction_witness(s.subspace, ms);
  // |z| = 2.09 ||T|| keeps ||(T - z)^-1|| <= 1 / (1.09 ||T||), so U stays O(1) even when T carries
  // a Jordan block, and rounding is not amplified by the non-normal part of T = (A + delta K)^-1 K
  const Mat t = (p.A().mat() + delta * p.K().mat()).partialPivLu().solve(p.K().mat());
  r.cayley = cayley_isometry_residual(p, delta, 2.0 * la::norm2(t) * cplx(0.3, 1.0), 100, seed);
  return r;
}

Verification pontryagin_verification(const PontryaginReport& r) {
  Verification v;
  v.name = "pontryagin";
  v.add("dimension_equals_kappa", r.dim, "==", r.kappa);
  v.add("gram_n_pos", r.gram.n_pos, "==", 0);
  v.add_real("invariance_residual", r.invariance, "<=", 1e-7);
  v.add_real("contraction_witness", r.contraction, "<=", 1.0 + 1e-8);
  v.add_real("cayley_isometry_residual", r.cayley, "<=", 1e-9);
  return v;
}

// (L+ u, u) = (L- u', u') for random u on the zero-mean basis.
double kdv_form_relation(const wave::KdvOperators& k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    Vec u(k.D.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = nd(rng);
    const Vec du = k.D * u;
    const double a = u.dot(k.ops.Lp * u), b = du.dot(k.ops.Lm * du);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
  }
  return worst;
}

// KdV with omega+ = 0: the eigenvalue of A + delta K grown out of ker A, and the bottom of the rest.
void kdv_proviso(const Pencil& p, double delta, double c, ConstrainedIndices& ci) {
  if (ci.inertia_A.n_zero != 1) return;
  const la::SymEig ea = la::sym_eig(p.A().mat(), true);
  Eigen::Index iz = 0;
  ea.values.cwiseAbs().minCoeff(&iz);
  const Vec a0 = ea.vectors.col(iz);
  const la::SymEig ed = la::sym_eig(p.A().mat() + delta * p.K().mat(), true);
  Eigen::Index ib = 0;
  (ed.vectors.transpose() * a0).cwiseAbs().maxCoeff(&ib);
  ci.proviso_checked = true;
  ci.bifurcating_eig = ed.values(ib);
  ci.band_bound = delta / c;
  // delta / c bounds the bottom of the continuous spectrum of A + delta K from below
  ci.proviso_ok = ci.bifurcating_eig < ci.band_bound;
}

}  // namespace

bool BlockOutcome::pass() const {
  for (const auto& v : verifications)
    if (v.applicable && !v.pass) return false;
  return true;
}

const Verification* BlockOutcome::find(const std::string& name) const {
  for (const auto& v : verifications)
    if (v.name == name) return &v;
  return nullptr;
}

json counters_json(const CountReport& r) {
  json j = json::object();
  for (const auto& n : oracle::counter_names()) j[n] = oracle::counter_value(r, n);
  return j;
}

json verification_json(const Verification& v) {
  json checks = json::array();
  for (const auto& c : v.checks) {
    json jc{{"name", c.name}, {"relation", c.relation}};
    if (c.real_valued) {
      jc["lhs"] = c.value;
      jc["rhs"] = c.limit;
    } else {
      jc["lhs"] = c.lhs;
      jc["rhs"] = c.rhs;
    }
    jc["pass"] = c.pass;
    checks.push_back(std::move(jc));
  }
  return json{{"name", v.name}, {"applicable", v.applicable}, {"pass", v.pass}, {"note", v.note}, {"checks", checks}};
}

BlockOutcome analyze_block(const BlockInput& in, const Tolerances& tol, std::optional<double> delta_override,
                           bool run_oracle, std::uint64_t seed) {
  BlockOutcome b;
  b.label = in.label;
  b.mode = in.mode;
  std::optional<ProjectedPencil> pp;
  if (in.ops)
    pp = project_pencil(*in.ops, tol.kernel);
  else if (!in.pencil)
    throw std::logic_error("analyze_block: no operators and no pencil");
  const Pencil& p = pp ? pp->pencil : *in.pencil;
  b.dim = static_cast<int>(p.dim());
  b.band_edge = p.band_edge();

  SolveOptions so;
  so.cluster_tol = tol.cluster;
  b.spectrum = analyze_pencil(p, so);
  b.delta = select_delta(p, b.spectrum, tol.zero);
  if (delta_override) {
    const double d = *delta_override;
    if (!(d > 0) || (b.delta.sigma_neg1 && d >= std::abs(*b.delta.sigma_neg1)))
      throw ConfigError("delta override must lie in (0, |sigma_-1|)");
    if (b.delta.delta_alt == d) b.delta.delta_alt = b.delta.delta;
    b.delta.delta = d;
  }
  const double itol = std::min(tol.kernel, 1e-8);
  b.counts = tally(b.spectrum, p, b.delta.delta, tol.zero, itol);
  b.counts_alt = tally(b.spectrum, p, b.delta.delta_alt, tol.zero, itol);
  fill_lambda_counters(b.counts, in.model);
  fill_lambda_counters(b.counts_alt, in.model);
  b.A = inertia(p.A(), tol.kernel);
  b.K = inertia(p.K(), itol);
  b.split = zero_splitting(p, b.spectrum, b.delta.delta, tol.zero, tol.kernel);

  if (pp) {
    proposition1_indices(*in.ops, *pp, tol.kernel, b.indices, tol.overlap);
    b.Lp = pp->inertia_Lp;
    b.Lm = pp->inertia_Lm;
  } else {
    b.indices.inertia_A = b.A;
  }
  b.indices.delta = b.delta.delta;
  b.indices.sigma_neg1 = b.delta.sigma_neg1;
  b.indices.n_minus = b.split.n_minus;
  b.indices.n_plus = b.split.n_plus;
  b.indices.direct_minus = b.split.direct_minus;
  b.indices.direct_plus = b.split.direct_plus;
  b.indices.prop2_consistent = b.split.consistent;
  if (in.ops && in.ops->omega_plus == 0.0) kdv_proviso(p, b.delta.delta, in.ops->omega_minus, b.indices);

  // --- verifications
  b.verifications.push_back(verify_main(b.counts));
  b.verifications.push_back(verify_upper_bound(b.counts, p));
  if (in.ops) {
    ClosureInputs ci{in.model, in.mode, b.Lp, b.Lm, b.indices.inertia_A, b.indices, in.slope, in.excited_sites};
    b.verifications.push_back(closure_check(ci, b.counts));
  } else {
    Verification v;
    v.name = "closure";
    v.applicable = false;
    v.note = "no closure relation for a synthetic pencil";
    b.verifications.push_back(v);
  }
  {
    Verification v;
    v.name = "proposition1";
    if (pp) {
      v.add("neg_A", b.indices.inertia_A.n_neg, "==", b.indices.predicted_neg_A);
      v.add("zero_A", b.indices.inertia_A.n_zero, "==", b.indices.predicted_zero_A);
      v.add("pos_A_bound", b.indices.inertia_A.n_pos, "<=", b.indices.pos_A_bound);
      v.add("kappa_identity", b.K.n_neg, "==", b.Lm.n_neg);
    } else {
      v.applicable = false;
      v.note = "needs L+ and L-";
    }
    b.verifications.push_back(v);
  }
  {
    Verification v;
    v.name = "zero_splitting";
    v.add("n_minus", b.split.n_minus, "==", b.split.direct_minus);
    v.add("n_plus", b.split.n_plus, "==", b.split.direct_plus);
    v.add("complete", b.split.n_minus + b.split.n_plus, "==", b.A.n_zero);
    if (b.indices.proviso_checked) {
      v.add_real("proviso_bifurcating_below_band", b.indices.bifurcating_eig, "<=", b.indices.band_bound);
      v.note = "omega+ = 0: the eigenvalue of A + delta K bifurcating from ker A must lie below delta / c";
    }
    b.verifications.push_back(v);
  }
  {
    Verification v;
    v.name = "delta_invariance";
    v.add("counters_identical", counters_json(b.counts).dump() == counters_json(b.counts_alt).dump() ? 1 : 0, "==",
          1);
    v.add("verify_main_alt", verify_main(b.counts_alt).pass ? 1 : 0, "==", 1);
    b.verifications.push_back(v);
  }
  {
    Verification v;
    v.name = "conjugate_symmetry";
    v.add("Nc_plus_equals_Nc_minus", b.counts.Nc_plus, "==", b.counts.Nc_minus);
    b.verifications.push_back(v);
  }
  try {
    b.pontryagin = pontryagin_checks(p, b.spectrum, b.delta.delta, seed);
    b.verifications.push_back(pontryagin_verification(b.pontryagin));
  } catch (const TheoremViolation& e) {
    Verification v;
    v.name = "pontryagin";
    v.add("assembled", 0, "==", 1);
    v.note = e.what();
    b.verifications.push_back(v);
  }

  if (run_oracle) {
    Verification v;
    v.name = "oracle";
    const double ltol = std::sqrt(tol.zero);
    if (!in.ops) {
      b.oracle_route = "qz";
      const oracle::RouteCounts a = oracle::route_counts(b.spectrum, tol.zero);
      const oracle::RouteCounts q = oracle::qz_route_counts(p, tol.zero);
      v.add("neg", a.neg, "==", q.neg);
      v.add("zero", a.zero, "==", q.zero);
      v.add("pos", a.pos, "==", q.pos);
      v.add("complex_upper", a.complex_upper, "==", q.complex_upper);
    } else {
      if (in.model == ModelKind::kdv) {
        b.oracle_route = "d_lminus";
        oracle::KdvOrthogonality o;
        b.direct = oracle::direct_kdv(*in.kdv, ltol, &o);
        b.orth = o;
        v.add_real("orthogonality", o.max_error, "<=", 1e-8);
        v.add_real("form_relation", kdv_form_relation(*in.kdv, seed), "<=", 1e-10);
      } else if (in.model == ModelKind::vortex && in.mode >= 1) {
        b.oracle_route = "sigma3_h";
        b.direct = oracle::direct_vortex(*in.ops, ltol);
        if (in.profile) {
          b.pairing_error = oracle::vortex_pairing_error(*in.profile, in.mode);
          v.add_real("pairing", b.pairing_error, "<=", 1e-8);
        }
      } else {
        b.oracle_route = "hamiltonian_block";
        b.direct = oracle::direct_nls(*in.ops, ltol);
      }
      b.diff = oracle::pencil_vs_direct(b.counts, *b.direct);
      v.add("counter_diff_entries", static_cast<long>(b.diff.size()), "==", 0);
      v.add_real("lambda_symmetry", b.direct->symmetry_error, "<=", 1e-8);
      for (const auto& d : b.diff) v.note += d.name + ": pencil " + std::to_string(d.pencil) + " direct " +
                                             std::to_string(d.direct) + "; ";
    }
    b.verifications.push_back(v);
  }
  return b;
}

Pencil load_pencil_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open pencil file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto matrix = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty())
      throw ConfigError(path + ": '" + key + "' must be a nonempty array of rows");
    const auto& rows = j[key];
    const auto n = static_cast<Eigen::Index>(rows.size());
    Mat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw ConfigError(path + ": '" + key + "' must be square");
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!row[static_cast<std::size_t>(k)].is_number()) throw ConfigError(path + ": non-numeric entry");
        m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
      }
    }
    if ((m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm()))
      throw ConfigError(path + ": '" + key + "' is not symmetric");
    return m;
  };
  const Mat a = matrix("A"), k = matrix("K");
  if (a.rows() != k.rows()) throw ConfigError(path + ": A and K differ in size");
  const double wp = j.value("omega_plus", Pencil::kNoBand), wm = j.value("omega_minus", Pencil::kNoBand);
  if (la::singular_values(k).minCoeff() <= 1e-12 * std::max(1.0, la::norm2(k)))
    throw ConfigError(path + ": K must be invertible");
  return Pencil(SymMatrix(a), SymMatrix(k), wp, wm);
}

ModelSetup build_model(const RunConfig& c) {
  ModelSetup s;
  switch (c.model) {
    case ModelKind::nls: {
      s.profile = wave::nls_soliton(c.sigma, c.omega, c.grid);
      BlockInput b{"main", c.model, 0, wave::nls_operators(*s.profile), std::nullopt, std::nullopt, s.profile->slope};
      s.blocks.push_back(std::move(b));
      break;
    }
    case ModelKind::dnls: {
      s.profile = wave::dnls_state(c.dnls);
      BlockInput b{"main", c.model, 0, wave::dnls_operators(*s.profile), std::nullopt, std::nullopt, 0.0,
                   static_cast<int>(c.dnls.pattern.size())};
      s.blocks.push_back(std::move(b));
      break;
    }
    case ModelKind::vortex: {
      s.profile = wave::vortex_profile(c.charge, c.omega, c.radial);
      for (int n : c.modes) {
        BlockInput b{"n=" + std::to_string(n), c.model, n, wave::vortex_mode_operators(*s.profile, n),
                     std::nullopt, std::nullopt, s.profile->slope};
        s.blocks.push_back(std::move(b));
      }
      break;
    }
    case ModelKind::kdv: {
      s.profile = wave::kdv_profile(c.kdv, c.speed, c.grid);
      wave::KdvOperators k = wave::kdv_operators(*s.profile);
      BlockInput b{"main", c.model, 0, k.ops, std::nullopt, k, s.profile->slope};
      s.blocks.push_back(std::move(b));
      break;
    }
    case ModelKind::synthetic: {
      BlockInput b{"main", c.model, 0, std::nullopt, load_pencil_json(c.pencil_file)};
      s.blocks.push_back(std::move(b));
      break;
    }
  }
  if (s.profile)
    for (auto& b : s.blocks) b.profile = &*s.profile;
  return s;
}

AnalysisResult run_analysis(const RunConfig& c, bool run_oracle) {
  AnalysisResult r;
  ModelSetup setup = build_model(c);

  json inputs{{"name", c.name},
              {"model", model_name(c.model)},
              {"config", c.source},
              {"tolerances",
               {{"cluster", c.tol.cluster}, {"kernel", c.tol.kernel}, {"zero", c.tol.zero}, {"overlap", c.tol.overlap}}},
              {"delta_override", optional_json(c.delta)},
              {"seed", c.seed},
              {"simd", simd::isa_name(simd::active_isa())}};
  json profile = nullptr;
  if (setup.profile) {
    const auto& p = *setup.profile;
    profile = json{{"points", p.values.size()},      {"residual", p.residual},
                   {"iterations", p.iterations},     {"slope", p.slope},
                   {"max_abs", p.values.cwiseAbs().maxCoeff()}, {"norm_sq", wave::l2_norm_sq(p)}};
  }
  json op_in = json::array(), ind = json::array(), cnt = json::array(), ver = json::array(), orc = json::array(),
       pon = json::array();
  r.pass = true;
  for (std::size_t i = 0; i < setup.blocks.size(); ++i) {
    const BlockInput& in = setup.blocks[i];
    BlockOutcome b = analyze_block(in, c.tol, c.delta, run_oracle, splitmix(c.seed + i));
    r.pass = r.pass && b.pass();
    op_in.push_back({{"block", b.label},
                     {"dim", b.dim},
                     {"L_plus", in.ops ? inertia_json(b.Lp) : json(nullptr)},
                     {"L_minus", in.ops ? inertia_json(b.Lm) : json(nullptr)},
                     {"A", inertia_json(b.A)},
                     {"K", inertia_json(b.K)}});
    const auto& ci = b.indices;
    ind.push_back({{"block", b.label},
                   {"n0", ci.n0},
                   {"z0", ci.z0},
                   {"z1", ci.z1},
                   {"n_minus", ci.n_minus},
                   {"n_plus", ci.n_plus},
                   {"delta", b.delta.delta},
                   {"delta_alt", b.delta.delta_alt},
                   {"delta_fallback", b.delta.fallback},
                   {"sigma_neg1", optional_json(b.delta.sigma_neg1)},
                   {"mu", ci.mu},
                   {"proviso_checked", ci.proviso_checked},
                   {"bifurcating_eig", ci.bifurcating_eig},
                   {"band_bound", ci.band_bound}});
    json cj = counters_json(b.counts);
    cnt.push_back({{"block", b.label}, {"values", cj}});
    for (const auto& v : b.verifications) {
      json vj = verification_json(v);
      vj["block"] = b.label;
      ver.push_back(std::move(vj));
    }
    json diff = json::array();
    for (const auto& d : b.diff) diff.push_back({{"counter", d.name}, {"pencil", d.pencil}, {"direct", d.direct}});
    orc.push_back({{"block", b.label},
                   {"route", b.oracle_route},
                   {"diff", diff},
                   {"zero_cluster", b.direct ? json(b.direct->zero_cluster) : json(nullptr)},
                   {"symmetry_error", b.direct ? json(b.direct->symmetry_error) : json(nullptr)},
                   {"max_offzero_real", b.direct ? json(b.direct->max_offzero_real) : json(nullptr)},
                   {"orthogonality_error", b.orth ? json(b.orth->max_error) : json(nullptr)},
                   {"pairing_error", b.pairing_error}});
    pon.push_back({{"block", b.label},
                   {"kappa", b.pontryagin.kappa},
                   {"dim", b.pontryagin.dim},
                   {"gram", inertia_json(b.pontryagin.gram)},
                   {"invariance_residual", b.pontryagin.invariance},
                   {"contraction_witness", b.pontryagin.contraction},
                   {"cayley_isometry_residual", b.pontryagin.cayley}});
    r.blocks.push_back(std::move(b));
  }
  r.report = json{{"schema", "kcount-report/1"},
                  {"inputs", inputs},
                  {"profile", profile},
                  {"operator_inertia", op_in},
                  {"constrained_indices", ind},
                  {"counters", cnt},
                  {"verifications", ver},
                  {"oracle", orc},
                  {"pontryagin", pon},
                  {"embedded_policy",
                   "real gamma >= omega+ omega- is treated as embedded in the emulated band; embedded points are "
                   "counted in Nn_pos and reported as Np_emb/Nn_emb, and are not folded into the upper bound"},
                  {"spectra_files", json::array()},
                  {"pass", r.pass}};
  return r;
}

void write_spectrum_csv(const BlockOutcome& b, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << "re_gamma,im_gamma,re_lambda,im_lambda,alg_mult,geom_mult,krein_np,krein_nn,embedded_flag,participation\n";
  f << std::setprecision(12);
  for (const auto& pt : b.spectrum.points) {
    const cplx lambda = std::sqrt(-pt.gamma);  // gamma = -lambda^2, Re lambda >= 0
    const double part = pt.chain.cols() > 0 ? participation_ratio(pt.chain.col(0)) : 0.0;
    f << pt.gamma.real() << ',' << pt.gamma.imag() << ',' << lambda.real() << ',' << lambda.imag() << ','
      << pt.alg_mult << ',' << pt.geom_mult << ',' << pt.krein_np << ',' << pt.krein_nn << ','
      << (pt.is_embedded ? 1 : 0) << ',' << part << '\n';
  }
}

void write_outputs(AnalysisResult& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json files = json::array();
  for (const auto& b : r.blocks) {
    std::string tag = b.label;
    for (char& ch : tag)
      if (ch == '=') ch = '_';
    const std::string path = (std::filesystem::path(out_dir) / ("spectrum_" + tag + ".csv")).string();
    write_spectrum_csv(b, path);
    files.push_back(path);
  }
  r.report["spectra_files"] = files;
  const std::string rp = (std::filesystem::path(out_dir) / "report.json").string();
  std::ofstream f(rp);
  if (!f) throw ConfigError("cannot write " + rp);
  f << r.report.dump(2) << '\n';
}

// --- random pencils through the whole chain

TrialResult run_trial(const RandomVerifyOptions& o, int index) {
  std::mt19937_64 rng(splitmix(o.seed * 1000003ULL + static_cast<std::uint64_t>(index)));
  std::uniform_int_distribution<int> dimd(o.dim_lo, o.dim_hi);
  std::uniform_real_distribution<double> u01(0.0, 1.0), ug(-2.0, 2.0), ub(0.2, 1.5);
  TrialResult t;
  t.index = index;
  t.dim = dimd(rng);
  oracle::RandomPencilSpec spec;
  spec.dim = t.dim;
  std::optional<oracle::JordanSpec> planted;
  const double roll = u01(rng);
  if (o.positive_K) {
    t.kind = "sylvester";
    spec.k_negative = 0;
    if (u01(rng) < 0.2) spec.jordan.push_back({0.0, 1, 1});
  } else if (roll < o.jordan_fraction && t.dim >= 2) {
    t.kind = "jordan";
    const int len = t.dim >= 3 && u01(rng) < 0.5 ? 3 : 2;
    // gamma0 is zero or at least 0.05 away from it: a defective point just off zero forces a tiny shift
    // and leaves A + delta K nearly singular
    double g0 = 0.0;
    if (u01(rng) >= 0.3) {
      g0 = 0.05 + 1.95 * u01(rng);
      if (u01(rng) < 0.5) g0 = -g0;
    }
    planted = oracle::JordanSpec{g0, len, u01(rng) < 0.5 ? 1 : -1};
    spec.jordan.push_back(*planted);
  } else if (roll < o.jordan_fraction + o.complex_fraction && t.dim >= 2) {
    t.kind = "complex";
    spec.complex_pairs.push_back({ug(rng), ub(rng)});
    if (t.dim >= 6 && u01(rng) < 0.3) spec.complex_pairs.push_back({ug(rng), ub(rng)});
  } else {
    t.kind = "generic";
    spec.canonical = false;
  }
  const std::uint64_t pseed = rng();
  std::ostringstream why;
  try {
    const oracle::RandomPencil rp = oracle::random_pencil(spec, pseed);
    const Pencil& p = rp.pencil;
    const double zero_tol = 1e-8;
    const Spectrum sp = analyze_pencil(p);
    const DeltaChoice dc = select_delta(p, sp, zero_tol);
    CountReport r = tally(sp, p, dc.delta, zero_tol, 1e-10);
    CountReport r2 = tally(sp, p, dc.delta_alt, zero_tol, 1e-10);
    const Verification vm = verify_main(r);
    if (!vm.pass) {
      why << "verify_main:";
      for (const auto& c : vm.checks)
        if (!c.pass) why << ' ' << c.name << ' ' << c.lhs << c.relation << c.rhs;
      why << "; ";
    }
    if (!(r == r2)) why << "delta invariance; ";
    if (r.Nc_plus != r.Nc_minus) why << "conjugate symmetry; ";
    if (r.dim_HK_neg != rp.kappa) why << "kappa " << r.dim_HK_neg << " vs " << rp.kappa << "; ";
    const Verification pv = pontryagin_verification(pontryagin_checks(p, sp, dc.delta, pseed));
    if (!pv.pass) {
      why << "pontryagin:";
      for (const auto& c : pv.checks)
        if (!c.pass) why << ' ' << c.name << ' ' << (c.real_valued ? c.value : double(c.lhs));
      why << "; ";
    }
    if (!(oracle::route_counts(sp, zero_tol) == oracle::qz_route_counts(p, zero_tol))) why << "route agreement; ";
    const ZeroSplit zs = zero_splitting(p, sp, dc.delta, zero_tol, 1e-10);
    if (!zs.consistent) why << "zero splitting; ";
    if (planted) {
      bool found = false;
      for (const auto& pt : sp.points) {
        if (!pt.is_real() || std::abs(pt.gamma.real() - planted->gamma0) > 1e-6) continue;
        found = pt.alg_mult == planted->length && pt.geom_mult == 1 &&
                (pt.top_product > 0 ? 1 : -1) == planted->sign;
      }
      if (!found) why << "planted Jordan block not recovered; ";
    }
    if (o.positive_K) {
      const Inertia a = inertia(p.A(), 1e-10);
      if (r.Nn_neg + r.Nn_zero + r.Nn_pos + r.Nc_plus + r.Nc_minus != 0) why << "sylvester: nonzero Nn/Nc; ";
      if (r.Np_neg != a.n_neg || r.Np_zero != a.n_zero || r.Np_pos + r.Np_emb != a.n_pos)
        why << "sylvester: gamma signs differ from inertia(A); ";
    }
  } catch (const std::exception& e) {
    why << "exception: " << e.what();
  }
  t.failure = why.str();
  t.pass = t.failure.empty();
  return t;
}

RandomVerifySummary random_verify(const RandomVerifyOptions& o) {
  if (o.trials < 1) throw ConfigError("random-verify: trials must be at least 1");
  if (o.dim_lo < 1 || o.dim_hi < o.dim_lo) throw ConfigError("random-verify: bad dimension range");
  const auto t0 = std::chrono::steady_clock::now();
  RandomVerifySummary s;
  s.trials = o.trials;
  for (int i = 0; i < o.trials; ++i) {
    TrialResult t = run_trial(o, i);
    if (t.pass)
      ++s.passed;
    else
      s.failures.push_back(std::move(t));
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

std::string RandomVerifySummary::text(const RandomVerifyOptions& o) const {
  std::ostringstream os;
  os << "random-verify dims " << o.dim_lo << ".." << o.dim_hi << " trials " << o.trials << " seed " << o.seed
     << (o.positive_K ? " (K positive definite)" : "") << '\n';
  for (const auto& f : failures)
    os << "FAIL trial " << f.index << " dim " << f.dim << " " << f.kind << ": " << f.failure << '\n';
  os << passed << "/" << trials << " pass\n";
  return os.str();
}

// --- sweeps

SweepResult run_sweep(const RunConfig& c) {
  if (!c.sweep) throw ConfigError("sweep: the config has no [sweep] table");
  const SweepSpec& sw = *c.sweep;
  std::ostringstream csv;
  csv << std::setprecision(12) << "parameter,value,block,status,pass";
  for (const auto& n : oracle::counter_names()) csv << ',' << n;
  csv << ",error\n";
  SweepResult out;
  for (double v : sw.values()) {
    RunConfig rc = c;
    set_parameter(rc, sw.parameter, v);
    ++out.rows;
    try {
      const AnalysisResult r = run_analysis(rc, true);
      if (!r.pass) ++out.failed_rows;
      for (const auto& b : r.blocks) {
        csv << sw.parameter << ',' << v << ',' << b.label << ",ok," << (b.pass() ? 1 : 0);
        for (const auto& n : oracle::counter_names()) csv << ',' << oracle::counter_value(b.counts, n);
        csv << ",\n";
      }
    } catch (const std::exception& e) {
      ++out.failed_rows;
      std::string msg = e.what();
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      csv << sw.parameter << ',' << v << ",,error,0";
      for (std::size_t i = 0; i < oracle::counter_names().size(); ++i) csv << ',';
      csv << msg << '\n';
    }
  }
  out.csv = csv.str();
  return out;
}

}  // namespace kc::cli
