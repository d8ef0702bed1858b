#include "kc/count_engine.hpp"

#include <cmath>

#include "kc/errors.hpp"
#include "kc/simd.hpp"

namespace kc {

ModelKind parse_model(const std::string& name) {
  if (name == "synthetic") return ModelKind::synthetic;
  if (name == "nls") return ModelKind::nls;
  if (name == "dnls") return ModelKind::dnls;
  if (name == "vortex") return ModelKind::vortex;
  if (name == "kdv") return ModelKind::kdv;
  throw ConfigError("unknown model '" + name + "' (expected nls, dnls, vortex, kdv or synthetic)");
}

const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::synthetic: return "synthetic";
    case ModelKind::nls: return "nls";
    case ModelKind::dnls: return "dnls";
    case ModelKind::vortex: return "vortex";
    case ModelKind::kdv: return "kdv";
  }
  return "?";
}

CountReport tally(const Spectrum& spec, const Pencil& p, double delta, double zero_tol, double inertia_tol) {
  CountReport r;
  for (const auto& pt : spec.points) {
    if (!pt.classified()) throw NumericalError("tally: spectrum contains an unclassified point");
    if (!pt.is_real()) {
      (pt.gamma.imag() > 0 ? r.Nc_plus : r.Nc_minus) += pt.alg_mult;
      continue;
    }
    const double g = pt.gamma.real();
    if (g < -zero_tol) {
      r.Np_neg += pt.krein_np;
      r.Nn_neg += pt.krein_nn;
    } else if (g <= zero_tol) {
      r.Np_zero += pt.krein_np;
      r.Nn_zero += pt.krein_nn;
    } else {
      r.Nn_pos += pt.krein_nn;
      if (pt.is_embedded) {
        r.Np_emb += pt.krein_np;
        r.Nn_emb += pt.krein_nn;
      } else {
        r.Np_pos += pt.krein_np;
      }
    }
  }
  r.dim_HK_neg = inertia(p.K(), inertia_tol).n_neg;
  r.dim_HAdK_neg = inertia(SymMatrix(p.A().mat() + delta * p.K().mat()), inertia_tol).n_neg;

  const Vec ea = la::sym_eig(p.A().mat(), false).values;
  const Vec ek = la::sym_eig(p.K().mat(), false).values;
  const double kmax = p.omega_minus() >= Pencil::kNoBand ? 0.0 : 1.0 / p.omega_minus();
  for (Eigen::Index i = 0; i < ea.size(); ++i)
    if (ea(i) < p.omega_plus()) ++r.N_A;
  for (Eigen::Index i = 0; i < ek.size(); ++i)
    if (ek(i) < 0 || ek(i) > kmax) ++r.N_K;
  return r;
}

LambdaCounters lambda_counters(const CountReport& r, ModelKind m) {
  LambdaCounters l;
  const int neg = r.Np_neg + r.Nn_neg;
  if (m == ModelKind::kdv) {
    l.parity_ok = neg % 2 == 0 && r.Nc_plus % 2 == 0 && r.Nn_pos % 2 == 0;
    l.N_real = neg / 2;
    l.N_comp = r.Nc_plus / 2;
    l.N_imag_neg = r.Nn_pos / 2;
  } else {
    l.N_real = neg;
    l.N_comp = r.Nc_plus;
    l.N_imag_neg = r.Nn_pos;
    if (m == ModelKind::vortex) l.parity_ok = neg % 2 == 0;
  }
  l.N_zero_neg = r.Nn_zero;
  return l;
}

void fill_lambda_counters(CountReport& r, ModelKind m) {
  const LambdaCounters l = lambda_counters(r, m);
  r.N_real = l.N_real;
  r.N_comp = l.N_comp;
  r.N_imag_neg = l.N_imag_neg;
  r.N_zero_neg = l.N_zero_neg;
}

void Verification::add(const std::string& cname, long lhs, const std::string& rel, long rhs) {
  Check c{cname, rel, lhs, rhs, false};
  if (rel == "==")
    c.pass = lhs == rhs;
  else if (rel == "<=")
    c.pass = lhs <= rhs;
  else if (rel == ">=")
    c.pass = lhs >= rhs;
  else
    throw std::logic_error("Verification::add: unknown relation " + rel);
  pass = pass && c.pass;
  checks.push_back(std::move(c));
}

void Verification::add_real(const std::string& cname, double value, const std::string& rel, double limit) {
  Check c{cname, rel, 0, 0, false, true, value, limit};
  if (rel == "<=")
    c.pass = value <= limit;
  else if (rel == ">=")
    c.pass = value >= limit;
  else
    throw std::logic_error("Verification::add_real: unknown relation " + rel);
  pass = pass && c.pass;
  checks.push_back(std::move(c));
}

Verification verify_main(const CountReport& r) {
  Verification v;
  v.name = "main";
  v.add("negative_index_A", r.Np_neg + r.Nn_zero + r.Nn_pos + r.Nc_plus, "==", r.dim_HAdK_neg);
  v.add("negative_index_K", r.Nn_neg + r.Nn_zero + r.Nn_pos + r.Nc_plus, "==", r.dim_HK_neg);
  const long n_neg = r.dim_HAdK_neg + r.dim_HK_neg;
  const long n_unst = r.Np_neg + r.Nn_neg + 2L * r.Nc_plus;
  v.add("closure_delta_N", n_neg - n_unst, "==", 2L * r.Nn_pos + 2L * r.Nn_zero);
  v.add("closure_delta_N_nonnegative", n_neg - n_unst, ">=", 0);
  return v;
}

Verification verify_upper_bound(const CountReport& r, const Pencil& p) {
  Verification v;
  v.name = "upper_bound";
  if (!(p.omega_plus() > 0.0)) {
    v.applicable = false;
    v.note = "omega_plus = 0: the upper bound does not apply";
    return v;
  }
  v.add("upper_bound", r.Np_neg + r.Np_zero + r.Np_pos + r.Nc_plus, "<=", r.N_A + r.N_K);
  const long n_isol = r.Np_neg + r.Nn_neg + r.Np_zero + r.Nn_zero + r.Np_pos + (r.Nn_pos - r.Nn_emb) +
                      r.Nc_plus + r.Nc_minus;
  v.add("total_number", n_isol, "<=", r.N_A + r.N_K + r.dim_HK_neg);
  if (r.Np_emb + r.Nn_emb > 0)
    v.note = "embedded points are reported separately and not folded into the bound";
  return v;
}

namespace {

void example1_checks(Verification& v, const ClosureInputs& in, const CountReport& r) {
  v.add("kappa_count", r.Nn_neg + r.Nn_zero + r.Nn_pos + r.Nc_plus, "==", in.Lm.n_neg);
  v.add("zero_count", r.Np_zero, "==", in.A.n_zero);
  v.add("negative_count", r.Np_neg, "==", in.Lp.n_neg - in.indices.n0);
}

}  // namespace

Verification closure_check(const ClosureInputs& in, const CountReport& r) {
  Verification v;
  v.name = "closure";
  switch (in.model) {
    case ModelKind::synthetic:
      v.applicable = false;
      v.note = "no closure relation for a synthetic pencil";
      break;
    case ModelKind::nls:
      example1_checks(v, in, r);
      v.add("n0_from_slope", in.indices.n0, "==", in.slope > 0 ? 1 : 0);
      break;
    case ModelKind::dnls:
      v.add("example2_A", r.Np_neg + r.Nn_pos + r.Nc_plus, "==", in.Lp.n_neg - 1);
      v.add("example2_K", r.Nn_neg + r.Nn_pos + r.Nc_plus, "==", in.Lm.n_neg);
      v.add("n_Lp_equals_sites", in.Lp.n_neg, "==", in.excited_sites);
      break;
    case ModelKind::vortex:
      if (in.mode_index == 0) {
        example1_checks(v, in, r);
        break;
      }
      // 1/2 N_real + N_comp = n(H_n) - N_zero- - N_imag-, doubled to stay integral
      v.add("closure_relation2", r.N_real + 2L * r.N_comp, "==",
            2L * (in.Lp.n_neg - r.N_zero_neg - r.N_imag_neg));
      v.add("N_real_even", r.N_real % 2, "==", 0);
      v.add("n0_equals_n_minus", in.indices.n0, "==", in.indices.n_minus);
      break;
    case ModelKind::kdv: {
      const LambdaCounters l = lambda_counters(r, ModelKind::kdv);
      v.add("reflection_pairing", l.parity_ok ? 1 : 0, "==", 1);
      v.add("closure_relation1", r.N_real + 2L * r.N_comp + 2L * r.N_imag_neg, "==", in.Lm.n_neg - r.N_zero_neg);
      v.add("closure_11", r.N_real + 2L * r.N_comp + 2L * r.N_imag_neg, "==", in.A.n_neg);
      v.add("N_zero_from_slope", r.N_zero_neg, "==", in.slope > 0 ? 1 : 0);
      v.add("n0_equals_N_zero", in.indices.n0, "==", r.N_zero_neg);
      break;
    }
  }
  return v;
}

double participation_ratio(const CVec& f) {
  const Vec a = f.cwiseAbs();
  double s2 = 0, s4 = 0;
  simd::moments24(a.data(), static_cast<std::size_t>(a.size()), s2, s4);
  if (s4 == 0) return 0.0;
  return s2 * s2 / (static_cast<double>(a.size()) * s4);
}

}  // namespace kc
