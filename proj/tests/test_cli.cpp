#include "aspdhg/experiment.hpp"
#include "aspdhg/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace aspdhg;
namespace fs = std::filesystem;

namespace {

fs::path fresh_root(std::string const &name)
{
  fs::path const root = fs::temp_directory_path() / "aspdhg-test-cli" / name;
  fs::remove_all(root);
  fs::create_directories(root);
  return root;
}

// A small sparse-view instance that runs in well under a second.
RunSpec small_spec(fs::path const &root)
{
  RunSpec s;
  s.grid = 16;
  s.n_angles = 10;
  s.n_detectors = 23;
  s.pixel_size = 1.0;
  s.lambda = 0.5;
  s.epochs = 6;
  s.reference_iters = 300;
  s.reference_ratio = 1e-2;
  s.ratio0 = 1e-2;
  s.out_root = root;
  return s;
}

std::string slurp(fs::path const &p)
{
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t count_lines(fs::path const &p)
{
  std::string const s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

int run_cli(std::string const &args)
{
  std::string const cmd = std::string(ASPDHG_CLI) + " " + args + " >/dev/null 2>&1";
  int const rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string const kSmallFlags =
  "--grid 16 --n-angles 10 --n-detectors 23 --pixel-size 1 --lambda 0.5 --reference-iters 300 "
  "--reference-ratio 1e-2 --ratio0 1e-2";

} // namespace

TEST_CASE("run writes the expected files")
{
  auto const root = fresh_root("run");
  RunSpec spec = small_spec(root);
  spec.controller.rule = Rule::a;
  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_run(spec, out, err) == 0);
  fs::path const dir = root / default_run_name(spec);
  CHECK(default_run_name(spec) == "sparse_view-a-paper-r0.01-s1");
  for (char const *f : {"trace.csv", "summary.csv", "spec.ini", "recon.pgm", "phantom.pgm", "sinogram.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  std::size_t const n_blocks = 6;
  CHECK(count_lines(dir / "trace.csv") == 1 + 6 * n_blocks);
  CHECK(count_lines(dir / "summary.csv") == 2);
  auto const img = read_pgm(dir / "recon.pgm");
  CHECK(img.width == 16);
  CHECK(img.height == 16);
  Matrix const sino = read_csv_matrix(dir / "sinogram.csv");
  CHECK(sino.rows() == 10);
  CHECK(sino.cols() == 23);

  // spec.ini reproduces the run.
  RunSpec again;
  apply_config(again, parse_ini(dir / "spec.ini"));
  again.out_root = fresh_root("run-again");
  REQUIRE(cmd_run(again, out, err) == 0);
  CHECK(slurp(again.out_root / default_run_name(again) / "trace.csv") == slurp(dir / "trace.csv"));
}

TEST_CASE("invalid specs fail before writing anything")
{
  auto const root = fresh_root("invalid");
  std::ostringstream out;
  std::ostringstream err;

  RunSpec spec = small_spec(root);
  spec.ratio0 = 0.0;
  CHECK(cmd_run(spec, out, err) == 2);
  spec.ratio0 = -1e-3;
  CHECK(cmd_run(spec, out, err) == 2);
  spec = small_spec(root);
  spec.epochs = -1;
  CHECK(cmd_run(spec, out, err) == 2);
  spec = small_spec(root);
  spec.tau0 = 10.0;
  spec.sigma0 = 10.0;
  CHECK(cmd_run(spec, out, err) == 3);
  CHECK(err.str().find("infeasible") != std::string::npos);
  CHECK(fs::is_empty(root));

  RunSpec bad;
  CHECK_THROWS_AS(apply_config(bad, {{"problem.nosuch", "1"}}), ConfigError);
  CHECK_THROWS_AS(apply_config(bad, {{"run.epochs", "ten"}}), ConfigError);
  CHECK_THROWS_AS(apply_config(bad, {{"controller.rule", "z"}}), ConfigError);
}

TEST_CASE("runs are deterministic")
{
  std::ostringstream out;
  std::ostringstream err;
  RunSpec a = small_spec(fresh_root("det-a"));
  RunSpec b = small_spec(fresh_root("det-b"));
  a.controller.rule = b.controller.rule = Rule::b;
  REQUIRE(cmd_run(a, out, err) == 0);
  REQUIRE(cmd_run(b, out, err) == 0);
  auto const name = default_run_name(a);
  CHECK(slurp(a.out_root / name / "trace.csv") == slurp(b.out_root / name / "trace.csv"));
  CHECK(slurp(a.out_root / name / "summary.csv") == slurp(b.out_root / name / "summary.csv"));
}

TEST_CASE("sweep")
{
  std::ostringstream out;
  std::ostringstream err;
  RunSpec base = small_spec(fresh_root("sweep"));
  base.epochs = 3;
  std::vector<double> const ratios{1e-3, 1e-5, 1e-7, 1e-9};
  std::vector<Rule> const rules{Rule::fixed, Rule::a, Rule::b};
  REQUIRE(cmd_sweep(base, ratios, rules, 2, out, err) == 0);
  fs::path const dir = base.out_root / "sweep-sparse_view";
  CHECK(count_lines(dir / "summary.csv") == 1 + 12);
  std::size_t children = 0;
  for (auto const &e : fs::directory_iterator(dir)) { children += e.is_directory() ? 1 : 0; }
  CHECK(children == 12);

  // Rows come out in rule-major order with consecutive seeds.
  std::istringstream rows(slurp(dir / "summary.csv"));
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  CHECK(line.rfind("sparse_view-fixed-r0.001-s1,fixed,paper,0.001,1,", 0) == 0);

  RunSpec empty = small_spec(fresh_root("sweep-empty"));
  std::ostringstream warn;
  CHECK(cmd_sweep(empty, {}, rules, 1, out, warn) == 0);
  CHECK(warn.str().find("nothing to sweep") != std::string::npos);
  CHECK(fs::is_empty(empty.out_root));
}

TEST_CASE("a one-point sweep matches run")
{
  std::ostringstream out;
  std::ostringstream err;
  RunSpec base = small_spec(fresh_root("sweep-one"));
  base.controller.rule = Rule::a;
  REQUIRE(cmd_sweep(base, {base.ratio0}, {Rule::a}, 1, out, err) == 0);
  RunSpec single = small_spec(fresh_root("sweep-one-run"));
  single.controller.rule = Rule::a;
  REQUIRE(cmd_run(single, out, err) == 0);
  auto const name = default_run_name(single);
  CHECK(slurp(base.out_root / "sweep-sparse_view" / name / "trace.csv") ==
        slurp(single.out_root / name / "trace.csv"));
}

TEST_CASE("sensitivity")
{
  CHECK_THROWS_AS(check_sensitivity_param(Rule::b, "delta"), ConfigError);
  CHECK_THROWS_AS(check_sensitivity_param(Rule::b, "s_scale"), ConfigError);
  CHECK_THROWS_AS(check_sensitivity_param(Rule::a, "c"), ConfigError);
  CHECK_THROWS_AS(check_sensitivity_param(Rule::fixed, "eta"), ConfigError);
  CHECK_THROWS_AS(check_sensitivity_param(Rule::a, "beta"), ConfigError);
  CHECK_NOTHROW(check_sensitivity_param(Rule::a, "delta"));
  CHECK_NOTHROW(check_sensitivity_param(Rule::b, "c"));

  std::ostringstream out;
  std::ostringstream err;
  RunSpec rb = small_spec(fresh_root("sens-reject"));
  rb.controller.rule = Rule::b;
  CHECK(cmd_sensitivity(rb, "delta", {1.5, 2.0}, 1, out, err) == 2);
  CHECK(fs::is_empty(rb.out_root));

  RunSpec base = small_spec(fresh_root("sens"));
  base.controller.rule = Rule::a;
  REQUIRE(cmd_sensitivity(base, "alpha0", {0.5, 0.25}, 1, out, err) == 0);
  fs::path const dir = base.out_root / "sensitivity-alpha0";
  CHECK(count_lines(dir / "summary.csv") == 3);

  RunSpec single = small_spec(fresh_root("sens-run"));
  single.controller.rule = Rule::a;
  REQUIRE(cmd_run(single, out, err) == 0);
  auto const name = default_run_name(single);
  CHECK(slurp(dir / (name + "-alpha0-0.5") / "trace.csv") == slurp(single.out_root / name / "trace.csv"));
}

TEST_CASE("command line binary")
{
  auto const root = fresh_root("binary");
  std::string const out = " --out " + root.string();

  CHECK(run_cli("run " + kSmallFlags + " --epochs 2 --rule a --name r1" + out) == 0);
  CHECK(count_lines(root / "r1" / "trace.csv") == 1 + 2 * 6);

  CHECK(run_cli("run " + kSmallFlags + " --ratio0 0" + " --name r0" + out) == 2);
  CHECK_FALSE(fs::exists(root / "r0"));
  CHECK(run_cli("run --nosuch" + out) != 0);
  CHECK(run_cli("") != 0);

  // Flags override the config file.
  fs::path const ini = root / "cfg.ini";
  {
    std::ofstream os(ini);
    os << "[run]\nepochs = 3\n[controller]\nrule = b\n[output]\nname = fromcfg\n";
  }
  CHECK(run_cli("run " + kSmallFlags + " --config " + ini.string() + out) == 0);
  CHECK(count_lines(root / "fromcfg" / "trace.csv") == 1 + 3 * 6);
  CHECK(run_cli("run " + kSmallFlags + " --config " + ini.string() + " --epochs 4" + out) == 0);
  CHECK(count_lines(root / "fromcfg" / "trace.csv") == 1 + 4 * 6);
  auto const kv = parse_ini(root / "fromcfg" / "spec.ini");
  CHECK(kv.at("controller.rule") == "b");

  // The output root falls back to the environment.
  fs::path const env_root = fresh_root("binary-env");
  ::setenv("ASPDHG_OUT_ROOT", env_root.c_str(), 1);
  CHECK(run_cli("run " + kSmallFlags + " --epochs 1 --name viaenv") == 0);
  ::unsetenv("ASPDHG_OUT_ROOT");
  CHECK(fs::exists(env_root / "viaenv" / "trace.csv"));

  CHECK(run_cli("sweep " + kSmallFlags + " --epochs 1 --ratios 1e-2,1e-3 --rules fixed,a --name sw" + out) == 0);
  CHECK(count_lines(root / "sw" / "summary.csv") == 1 + 4);
  CHECK(run_cli("sweep " + kSmallFlags + " --ratios 1e-2,abc" + out) == 2);
  CHECK(run_cli("sensitivity " + kSmallFlags + " --rule b --param delta --values 1.5" + out) == 2);
  CHECK(run_cli("sensitivity " + kSmallFlags + " --epochs 1 --rule b --param c --values 0.99,0.9 --name se" + out) ==
        0);
  CHECK(count_lines(root / "se" / "summary.csv") == 1 + 2);
}
