#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "kc/errors.hpp"
#include "kc/pipeline.hpp"

using namespace kc;
using cli::json;
namespace fs = std::filesystem;

namespace {

struct RunOut {
  int code = -1;
  std::string out;
};

// Runs kcount with stdout captured; stderr is discarded.
RunOut kcount(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / ("kc_cli_" + std::to_string(std::rand()) + ".txt");
  const std::string cmd = std::string(KC_KCOUNT_PATH) + " " + args + " > " + log.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunOut r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(log);
  return r;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)) + 1e-10; }

// Integers must match exactly, reals to a relative 1e-6. Fields missing from the golden file are skipped.
void compare(const json& got, const json& want, const std::string& where) {
  if (want.is_object()) {
    REQUIRE_MESSAGE(got.is_object(), where);
    for (auto it = want.begin(); it != want.end(); ++it) {
      if (it.key() == "residual") continue;
      REQUIRE_MESSAGE(got.contains(it.key()), where << "." << it.key());
      compare(got.at(it.key()), it.value(), where + "." + it.key());
    }
  } else if (want.is_array()) {
    REQUIRE_MESSAGE(got.is_array(), where);
    REQUIRE_MESSAGE(got.size() == want.size(), where);
    for (std::size_t i = 0; i < want.size(); ++i) compare(got[i], want[i], where + "[" + std::to_string(i) + "]");
  } else if (want.is_number_float()) {
    CHECK_MESSAGE(close(got.get<double>(), want.get<double>()), where << ": " << got << " vs " << want);
  } else {
    CHECK_MESSAGE(got == want, where << ": " << got << " vs " << want);
  }
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("TOML subset") {
  const json j = cli::parse_toml(R"(
# comment
name = "x"  # trailing
seed = 7
[model]
kind = "nls"
omega = 1.5e0
flag = true
pattern = [1, -1, 2]
[grid.inner]
n = -3
)");
  CHECK(j["name"] == "x");
  CHECK(j["seed"] == 7);
  CHECK(j["model"]["omega"] == 1.5);
  CHECK(j["model"]["flag"] == true);
  CHECK(j["model"]["pattern"] == json::array({1, -1, 2}));
  CHECK(j["grid"]["inner"]["n"] == -3);
  CHECK_THROWS_AS(cli::parse_toml("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_toml("[m]\n[m]\n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_toml("a = \n"), ConfigError);
  CHECK_THROWS_AS(cli::parse_toml("[broken\n"), ConfigError);
  try {
    cli::parse_toml("a = 1\nb = \"open\n", "f.toml");
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("f.toml:2") != std::string::npos);
  }
}

TEST_CASE("config schema") {
  const cli::RunConfig c = cli::parse_config("[model]\nkind = \"nls\"\nomega = 4.0\n", "t");
  CHECK(c.model == ModelKind::nls);
  CHECK(c.grid.half_length == doctest::Approx(10.0));
  CHECK(c.tol.kernel == cli::default_tolerances(ModelKind::nls).kernel);
  CHECK_THROWS_AS(cli::parse_config("[model]\nkind = \"nls\"\nomegaa = 1.0\n", "t"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[model]\nkind = \"heat\"\n", "t"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("name = \"no model\"\n", "t"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[model]\nkind = \"nls\"\nomega = -1.0\n", "t"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[model]\nkind = \"nls\"\n[sweep]\nparameter = \"omega\"\nfrom = 1.0\nto = 2.0\nsteps = 0\n", "t"),
                  ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[model]\nkind = \"nls\"\n[tolerances]\nzero = -1.0\n", "t"), ConfigError);
}

TEST_CASE("sweep values and parameters") {
  cli::SweepSpec s{"eps", 0.01, 0.1, 10};
  const auto v = s.values();
  REQUIRE(v.size() == 10);
  CHECK(v.front() == doctest::Approx(0.01));
  CHECK(v.back() == doctest::Approx(0.1));
  cli::RunConfig c = cli::parse_config("[model]\nkind = \"dnls\"\n", "t");
  cli::set_parameter(c, "eps", 0.07);
  CHECK(c.dnls.eps == 0.07);
  CHECK_THROWS_AS(cli::set_parameter(c, "bogus", 1.0), ConfigError);
}

TEST_CASE("environment overrides") {
  cli::RunConfig c = cli::parse_config("[model]\nkind = \"nls\"\n", "t");
  setenv("KC_TOL_CLUSTER", "3e-7", 1);
  setenv("KC_SEED", "12", 1);
  cli::apply_env_overrides(c);
  unsetenv("KC_TOL_CLUSTER");
  unsetenv("KC_SEED");
  CHECK(c.tol.cluster == 3e-7);
  CHECK(c.seed == 12);
  setenv("KC_DELTA", "abc", 1);
  CHECK_THROWS_AS(cli::apply_env_overrides(c), ConfigError);
  unsetenv("KC_DELTA");
}

TEST_CASE("exit code contract") {
  const fs::path out = fs::temp_directory_path() / "kc_cli_out";
  const std::string o = "--out " + out.string() + " ";
  CHECK(kcount("").code == 2);
  CHECK(kcount("random-verify --trials 0").code == 2);
  CHECK(kcount("random-verify --dims 5..2 --trials 3").code == 2);
  CHECK(kcount("random-verify --dims abc --trials 3").code == 2);
  CHECK(kcount(o + "analyze /nonexistent/config.toml").code == 2);
  const fs::path bad = write_temp("kc_bad.toml", "[model\nkind = nls\n");
  CHECK(kcount(o + "analyze " + bad.string()).code == 2);
  const fs::path nosweep = write_temp("kc_nosweep.toml", "[model]\nkind = \"dnls\"\n");
  CHECK(kcount(o + "sweep " + nosweep.string()).code == 2);
  const fs::path empty = write_temp("kc_empty_sweep.toml",
                                    "[model]\nkind = \"dnls\"\n[sweep]\nparameter = \"eps\"\nfrom = 0.1\nto = 0.2\nsteps = 0\n");
  CHECK(kcount(o + "sweep " + empty.string()).code == 2);

  // two Jordan blocks at one eigenvalue: no count rule, numerical exit
  const fs::path pj = write_temp("kc_two_blocks.json",
                                 R"({"A": [[0,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,1]],
                                     "K": [[0,1,0,0],[1,0,0,0],[0,0,0,1],[0,0,1,0]]})");
  const fs::path cj = write_temp("kc_two_blocks.toml", "[model]\nkind = \"synthetic\"\npencil_file = \"" + pj.string() + "\"\n");
  CHECK(kcount(o + "analyze " + cj.string()).code == 3);

  const RunOut ok = kcount(o + "analyze " + kct::source_path("configs/synthetic_jordan.toml"));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS") != std::string::npos);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "spectrum_main.csv"));

  // a shift outside (0, |sigma_-1|) is a usage error
  CHECK(kcount(o + "--delta 50 analyze " + kct::source_path("configs/nls_sigma3.toml")).code == 2);
  CHECK(kcount(o + "--delta -1 analyze " + kct::source_path("configs/synthetic_jordan.toml")).code == 2);
  CHECK(kcount(o + "--tol-kernel 0 analyze " + kct::source_path("configs/synthetic_jordan.toml")).code == 2);
  for (const auto& p : {bad, nosweep, empty, pj, cj}) fs::remove(p);
  fs::remove_all(out);
}

TEST_CASE("random-verify output is reproducible") {
  const RunOut a = kcount("random-verify --dims 2..10 --trials 60 --seed 11");
  const RunOut b = kcount("random-verify --dims 2..10 --trials 60 --seed 11");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("60/60 pass") != std::string::npos);
  cli::RandomVerifyOptions o;
  o.trials = 60;
  o.seed = 11;
  CHECK(cli::random_verify(o).text(o) == a.out);
}

TEST_CASE("sweeps record one row per value") {
  const fs::path out = fs::temp_directory_path() / "kc_cli_sweep";
  const RunOut r = kcount("--out " + out.string() + " sweep " + kct::source_path("configs/dnls_eps_sweep.toml"));
  CHECK(r.code == 0);
  std::ifstream in(out / "sweep.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("parameter,value,block,status,pass,Np_neg", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",ok,1,") != std::string::npos);
  }
  CHECK(rows == 10);
  fs::remove_all(out);
}

TEST_CASE("report schema is stable") {
  cli::RunConfig c = cli::load_config(kct::source_path("configs/dnls_out_of_phase.toml"));
  cli::AnalysisResult a = cli::run_analysis(c), b = cli::run_analysis(c);
  std::vector<std::string> keys;
  for (auto it = a.report.begin(); it != a.report.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"schema", "inputs", "profile", "operator_inertia", "constrained_indices",
                                         "counters", "verifications", "oracle", "pontryagin", "embedded_policy",
                                         "spectra_files", "pass"});
  CHECK(a.report.dump() == b.report.dump());
  const fs::path out = fs::temp_directory_path() / "kc_cli_schema";
  cli::write_outputs(a, out.string());
  std::ifstream csv(out / "spectrum_main.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("re_gamma,im_gamma,re_lambda,im_lambda,alg_mult,geom_mult,krein_np,krein_nn,embedded_flag", 0) == 0);
  fs::remove_all(out);
}

TEST_CASE("golden reports") {
  for (const char* name : {"nls_cubic", "nls_sigma3", "dnls_in_phase", "dnls_out_of_phase", "kdv_kawahara",
                           "synthetic_jordan", "vortex_m1"}) {
    CAPTURE(name);
    std::ifstream gf(kct::source_path(std::string("tests/golden/") + name + ".json"));
    const json golden = json::parse(gf);
    const cli::RunConfig c = cli::load_config(kct::source_path(std::string("configs/") + name + ".toml"));
    const cli::AnalysisResult r = cli::run_analysis(c);
    CHECK(r.pass);
    for (const char* section : {"counters", "operator_inertia", "constrained_indices", "profile", "pass"})
      compare(r.report.at(section), golden.at(section), section);
  }
}

}  // TEST_SUITE
