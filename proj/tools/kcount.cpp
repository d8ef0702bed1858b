// kcount: analyze configs, run random pencil suites and parameter sweeps.
// Exit codes: 0 pass, 1 verification failure, 2 config or usage error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>

#include "CLI11.hpp"
#include "kc/errors.hpp"
#include "kc/pipeline.hpp"

namespace {

using namespace kc;

struct Overrides {
  std::optional<double> tol_cluster, tol_kernel, delta;
};

double positive(const std::optional<double>& v, const char* flag) {
  if (!(*v > 0)) throw ConfigError(std::string(flag) + " must be positive");
  return *v;
}

void apply(cli::RunConfig& c, const Overrides& o) {
  cli::apply_env_overrides(c);
  if (o.tol_cluster) c.tol.cluster = positive(o.tol_cluster, "--tol-cluster");
  if (o.tol_kernel) c.tol.kernel = positive(o.tol_kernel, "--tol-kernel");
  if (o.delta) c.delta = positive(o.delta, "--delta");
}

std::pair<int, int> parse_dims(const std::string& s) {
  static const std::regex re(R"((\d+)\.\.(\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ConfigError("--dims expects A..B, got '" + s + "'");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

void summarize(const cli::AnalysisResult& r) {
  for (const auto& b : r.blocks) {
    std::cout << "[" << b.label << "] dim " << b.dim << "  N_real " << b.counts.N_real << "  N_comp "
              << b.counts.N_comp << "  N_imag- " << b.counts.N_imag_neg << "  N_zero- " << b.counts.N_zero_neg
              << "  Np0 " << b.counts.Np_zero << '\n';
    for (const auto& v : b.verifications) {
      if (!v.applicable) continue;
      std::cout << "  " << (v.pass ? "ok   " : "FAIL ") << v.name;
      if (!v.pass)
        for (const auto& c : v.checks)
          if (!c.pass) {
            std::cout << "  [" << c.name << ": ";
            if (c.real_valued)
              std::cout << c.value << ' ' << c.relation << ' ' << c.limit;
            else
              std::cout << c.lhs << ' ' << c.relation << ' ' << c.rhs;
            std::cout << ']';
          }
      std::cout << '\n';
    }
  }
  std::cout << (r.pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krein signature counts for generalized eigenvalue pencils and solitary-wave models"};
  app.require_subcommand(1);
  std::string out_dir = "kcount_out";
  Overrides ov;
  app.add_option("--out", out_dir, "Output directory")->envname("KC_OUT");
  app.add_option("--tol-cluster", ov.tol_cluster, "Relative eigenvalue clustering tolerance");
  app.add_option("--tol-kernel", ov.tol_kernel, "Relative kernel tolerance");
  app.add_option("--delta", ov.delta, "Shift delta override");

  std::string config;
  auto* analyze = app.add_subcommand("analyze", "Run the full analysis for a config");
  analyze->add_option("config", config, "TOML config")->required();
  bool no_oracle = false;
  analyze->add_flag("--no-oracle", no_oracle, "Skip the direct oracle cross-check");

  auto* sweep = app.add_subcommand("sweep", "Counters against a swept parameter");
  sweep->add_option("config", config, "TOML config with a [sweep] table")->required();

  std::string dims = "2..10";
  cli::RandomVerifyOptions ro;
  bool sylvester = false;
  auto* rv = app.add_subcommand("random-verify", "Theorem identities on random pencils");
  rv->add_option("--dims", dims, "Dimension range A..B");
  rv->add_option("--trials", ro.trials, "Number of pencils");
  rv->add_option("--seed", ro.seed, "Master seed");
  rv->add_flag("--positive-k", sylvester, "Draw K positive definite (Sylvester case)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) {
      cli::RunConfig c = cli::load_config(config);
      apply(c, ov);
      cli::AnalysisResult r = cli::run_analysis(c, !no_oracle);
      cli::write_outputs(r, out_dir);
      summarize(r);
      std::cout << "report: " << (std::filesystem::path(out_dir) / "report.json").string() << '\n';
      return r.pass ? 0 : 1;
    }
    if (sweep->parsed()) {
      cli::RunConfig c = cli::load_config(config);
      apply(c, ov);
      const cli::SweepResult s = cli::run_sweep(c);
      std::filesystem::create_directories(out_dir);
      const std::string path = (std::filesystem::path(out_dir) / "sweep.csv").string();
      std::ofstream(path) << s.csv;
      std::cout << s.csv << "rows " << s.rows << " failed " << s.failed_rows << "\nwritten: " << path << '\n';
      return s.failed_rows == 0 ? 0 : 1;
    }
    if (rv->parsed()) {
      std::tie(ro.dim_lo, ro.dim_hi) = parse_dims(dims);
      ro.positive_K = sylvester;
      const cli::RandomVerifySummary s = cli::random_verify(ro);
      std::cout << s.text(ro);
      return s.passed == s.trials ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const TheoremViolation& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
