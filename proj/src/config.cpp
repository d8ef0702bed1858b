#include "kc/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kc/errors.hpp"

namespace kc::cli {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a # comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char ch : k)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') return false;
  return true;
}

json parse_scalar(const std::string& raw, const std::string& origin, int line) {
  const std::string v = trim(raw);
  if (v.empty()) fail(origin, line, "missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') fail(origin, line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        const char n = v[++i];
        out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::string num;
  for (char ch : v)
    if (ch != '_') num += ch;
  const bool integral = num.find_first_of(".eEni") == std::string::npos;
  try {
    std::size_t used = 0;
    if (integral) {
      const long long x = std::stoll(num, &used);
      if (used == num.size()) return x;
    } else {
      const double x = std::stod(num, &used);
      if (used == num.size() && std::isfinite(x)) return x;
    }
  } catch (const std::exception&) {
  }
  fail(origin, line, "cannot parse value '" + v + "'");
}

json parse_value(const std::string& raw, const std::string& origin, int line) {
  const std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') fail(origin, line, "arrays must close on the same line");
    json arr = json::array();
    const std::string body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return arr;
    std::string item;
    bool in_str = false;
    for (char ch : body) {
      if (ch == '"') in_str = !in_str;
      if (ch == '[' && !in_str) fail(origin, line, "nested arrays are not supported");
      if (ch == ',' && !in_str) {
        arr.push_back(parse_scalar(item, origin, line));
        item.clear();
      } else {
        item += ch;
      }
    }
    if (!trim(item).empty()) arr.push_back(parse_scalar(item, origin, line));
    return arr;
  }
  return parse_scalar(v, origin, line);
}

}  // namespace

json parse_toml(const std::string& text, const std::string& origin) {
  json root = json::object();
  json* table = &root;
  std::set<std::string> seen_tables;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.size() < 3 || s.back() != ']' || s[1] == '[') fail(origin, line, "bad table header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (!seen_tables.insert(name).second) fail(origin, line, "table [" + name + "] defined twice");
      table = &root;
      std::stringstream parts(name);
      std::string part;
      while (std::getline(parts, part, '.')) {
        part = trim(part);
        if (!valid_key(part)) fail(origin, line, "bad table name '" + name + "'");
        json& next = (*table)[part];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) fail(origin, line, "'" + part + "' is not a table");
        table = &next;
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) fail(origin, line, "bad key '" + key + "'");
    if (table->contains(key)) fail(origin, line, "duplicate key '" + key + "'");
    (*table)[key] = parse_value(s.substr(eq + 1), origin, line);
  }
  return root;
}

Tolerances default_tolerances(ModelKind m) {
  Tolerances t;
  switch (m) {
    case ModelKind::synthetic:
      t.kernel = 1e-10;
      t.zero = 1e-8;
      break;
    case ModelKind::nls:
      break;
    case ModelKind::dnls:
      t.zero = 1e-7;
      break;
    case ModelKind::vortex:
      t.zero = 1e-4;
      t.overlap = 1e-3;
      break;
    case ModelKind::kdv:
      t.kernel = 1e-12;
      t.zero = 1e-8;
      break;
  }
  return t;
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  if (steps == 1) return {from};
  for (int i = 0; i < steps; ++i) v.push_back(from + (to - from) * i / (steps - 1));
  return v;
}

namespace {

// Typed access with schema checks; unknown keys are rejected.
class Table {
 public:
  Table(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be a table");
  }
  bool has(const std::string& k) const {
    used_.insert(k);
    return j_.contains(k);
  }
  double num(const std::string& k, double def) const {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(where_ + "." + k + " must be a number");
    return v.get<double>();
  }
  long long integer(const std::string& k, long long def) const {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(where_ + "." + k + " must be an integer");
    return v.get<long long>();
  }
  std::string str(const std::string& k, const std::string& def) const {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_string()) throw ConfigError(where_ + "." + k + " must be a string");
    return v.get<std::string>();
  }
  std::vector<int> ints(const std::string& k, const std::vector<int>& def) const {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(where_ + "." + k + " must be an array of integers");
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw ConfigError(where_ + "." + k + " must be an array of integers");
      out.push_back(x.get<int>());
    }
    return out;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string where_;
  mutable std::set<std::string> used_;
};

int positive_int(long long v, const std::string& what) {
  if (v < 1 || v > 1000000) throw ConfigError(what + " must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin, const std::string& base_dir) {
  const json doc = parse_toml(text, origin);
  RunConfig c;
  c.source = doc;
  Table top(doc, origin);
  c.name = top.str("name", "");
  const long long seed = top.integer("seed", 1);
  if (seed < 0) throw ConfigError("seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (top.has("delta")) {
    c.delta = top.num("delta", 0.0);
    if (!(*c.delta > 0)) throw ConfigError("delta must be positive");
  }
  if (!top.has("model")) throw ConfigError(origin + ": missing [model] table");
  const Table model(doc.at("model"), "model");
  c.model = parse_model(model.str("kind", ""));
  c.tol = default_tolerances(c.model);

  switch (c.model) {
    case ModelKind::nls:
      c.sigma = positive_int(model.integer("sigma", 1), "model.sigma");
      c.omega = model.num("omega", 1.0);
      if (!(c.omega > 0)) throw ConfigError("model.omega must be positive");
      c.grid = wave::Grid1D{512, 20.0 / std::sqrt(c.omega), wave::GridKind::finite_difference};
      break;
    case ModelKind::dnls:
      c.dnls.eps = model.num("eps", c.dnls.eps);
      c.dnls.omega = model.num("omega", c.dnls.omega);
      c.dnls.sites = positive_int(model.integer("sites", c.dnls.sites), "model.sites");
      c.dnls.pattern = model.ints("pattern", c.dnls.pattern);
      c.dnls.continuation_steps = positive_int(model.integer("continuation_steps", c.dnls.continuation_steps),
                                               "model.continuation_steps");
      for (int s : c.dnls.pattern)
        if (s != 1 && s != -1) throw ConfigError("model.pattern entries must be +1 or -1");
      break;
    case ModelKind::vortex:
      c.charge = positive_int(model.integer("charge", 1), "model.charge");
      c.omega = model.num("omega", 0.14);
      c.modes = model.ints("modes", c.modes);
      for (int n : c.modes)
        if (n < 0) throw ConfigError("model.modes must be nonnegative");
      break;
    case ModelKind::kdv:
      c.kdv.a1 = model.num("a1", c.kdv.a1);
      c.kdv.a2 = model.num("a2", c.kdv.a2);
      c.kdv.a3 = model.num("a3", c.kdv.a3);
      c.kdv.b1 = model.num("b1", c.kdv.b1);
      c.kdv.b2 = model.num("b2", c.kdv.b2);
      c.kdv.b3 = model.num("b3", c.kdv.b3);
      c.speed = model.num("c", c.speed);
      c.grid = wave::Grid1D{256, 50.0, wave::GridKind::periodic_spectral};
      break;
    case ModelKind::synthetic: {
      const std::string f = model.str("pencil_file", "");
      if (f.empty()) throw ConfigError("model.pencil_file is required for a synthetic model");
      const std::filesystem::path p(f);
      c.pencil_file = p.is_absolute() ? f : (std::filesystem::path(base_dir) / p).string();
      break;
    }
  }
  model.str("kind", "");
  model.reject_unknown();

  if (top.has("grid")) {
    const Table g(doc.at("grid"), "grid");
    if (c.model == ModelKind::vortex) {
      c.radial.n_points = positive_int(g.integer("n_points", c.radial.n_points), "grid.n_points");
      c.radial.r_max = g.num("r_max", c.radial.r_max);
      c.radial.validate();
    } else if (c.model == ModelKind::nls || c.model == ModelKind::kdv) {
      c.grid.n_points = positive_int(g.integer("n_points", c.grid.n_points), "grid.n_points");
      c.grid.half_length = g.num("half_length", c.grid.half_length);
      c.grid.validate();
    } else {
      throw ConfigError("[grid] does not apply to model " + std::string(model_name(c.model)));
    }
    g.reject_unknown();
  }
  if (top.has("tolerances")) {
    const Table t(doc.at("tolerances"), "tolerances");
    c.tol.cluster = t.num("cluster", c.tol.cluster);
    c.tol.kernel = t.num("kernel", c.tol.kernel);
    c.tol.zero = t.num("zero", c.tol.zero);
    c.tol.overlap = t.num("overlap", c.tol.overlap);
    t.reject_unknown();
    if (!(c.tol.cluster > 0 && c.tol.kernel > 0 && c.tol.zero > 0 && c.tol.overlap > 0))
      throw ConfigError("tolerances must be positive");
  }
  if (top.has("sweep")) {
    const Table s(doc.at("sweep"), "sweep");
    SweepSpec sw;
    sw.parameter = s.str("parameter", "");
    sw.from = s.num("from", 0.0);
    sw.to = s.num("to", 0.0);
    sw.steps = static_cast<int>(s.integer("steps", 0));
    s.reject_unknown();
    if (sw.parameter.empty()) throw ConfigError("sweep.parameter is required");
    if (sw.steps < 1) throw ConfigError("sweep.steps must be at least 1 (empty range)");
    RunConfig probe = c;
    set_parameter(probe, sw.parameter, sw.from);
    c.sweep = sw;
  }
  top.reject_unknown();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path, std::filesystem::path(path).parent_path().string());
}

void apply_env_overrides(RunConfig& c) {
  auto env = [](const char* name) -> std::optional<double> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const double x = std::strtod(v, &end);
    if (*end != '\0' || !std::isfinite(x)) throw ConfigError(std::string(name) + " is not a number");
    return x;
  };
  if (auto v = env("KC_TOL_CLUSTER")) c.tol.cluster = *v;
  if (auto v = env("KC_TOL_KERNEL")) c.tol.kernel = *v;
  if (auto v = env("KC_TOL_ZERO")) c.tol.zero = *v;
  if (auto v = env("KC_TOL_OVERLAP")) c.tol.overlap = *v;
  if (auto v = env("KC_DELTA")) c.delta = *v;
  if (auto v = env("KC_SEED")) {
    if (*v < 0) throw ConfigError("KC_SEED must be nonnegative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
}

void set_parameter(RunConfig& c, const std::string& key, double v) {
  auto need = [&](ModelKind m) {
    if (c.model != m) throw ConfigError("sweep parameter '" + key + "' does not apply to this model");
  };
  if (key == "omega") {
    if (c.model == ModelKind::dnls)
      c.dnls.omega = v;
    else if (c.model == ModelKind::nls || c.model == ModelKind::vortex)
      c.omega = v;
    else
      need(ModelKind::nls);
  } else if (key == "eps") {
    need(ModelKind::dnls);
    c.dnls.eps = v;
  } else if (key == "c") {
    need(ModelKind::kdv);
    c.speed = v;
  } else if (key == "a1" || key == "a2" || key == "a3" || key == "b1" || key == "b2" || key == "b3") {
    need(ModelKind::kdv);
    double* f[] = {&c.kdv.a1, &c.kdv.a2, &c.kdv.a3, &c.kdv.b1, &c.kdv.b2, &c.kdv.b3};
    const int idx = (key[0] == 'a' ? 0 : 3) + (key[1] - '1');
    *f[idx] = v;
  } else {
    throw ConfigError("unknown sweep parameter '" + key + "'");
  }
}

}  // namespace kc::cli
