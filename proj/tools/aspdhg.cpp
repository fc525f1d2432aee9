#include "aspdhg/experiment.hpp"
#include "aspdhg/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

using namespace aspdhg;

namespace {

struct Flag
{
  char const *name;
  char const *key;
  char const *help;
};

// Value flags that map one-to-one onto config keys.
Flag const kFlags[] = {
  {"--preset", "problem.preset", "sparse_view, low_dose, limited_angle or custom"},
  {"--lambda", "problem.lambda", "TV weight (default 0.5 * pixel_size^2, 1.0 * pixel_size^2 for low_dose)"},
  {"--grid", "problem.grid", "image side in pixels"},
  {"--n-angles", "problem.n_angles", "number of views"},
  {"--n-detectors", "problem.n_detectors", "detector bins per view"},
  {"--pixel-size", "problem.pixel_size", "pixel side in detector units"},
  {"--angle-range", "problem.angle_range", "angular range in degrees"},
  {"--noise", "problem.noise", "none, gaussian or poisson"},
  {"--sigma-rel", "problem.sigma_rel", "gaussian noise level relative to mean |sinogram|"},
  {"--dose", "problem.dose", "poisson dose (counts at the sinogram maximum)"},
  {"--data-seed", "problem.data_seed", "noise seed"},
  {"--n-batches", "problem.n_batches", "number of data blocks"},
  {"--tv-prob", "problem.tv_prob", "sampling probability of the TV block (0: uniform)"},
  {"--rule", "controller.rule", "fixed, a or b"},
  {"--mode", "controller.mode", "paper or strict"},
  {"--alpha0", "controller.alpha0", "initial adaptivity level"},
  {"--eta", "controller.eta", "decay of the adaptivity level"},
  {"--delta", "controller.delta", "dead band of rule a"},
  {"--c", "controller.c", "alignment threshold of rule b"},
  {"--s", "controller.s", "residual scale of rule a (default |A|)"},
  {"--s-scale", "controller.s_scale", "multiplier on s"},
  {"--beta", "controller.beta", "step-size product bound"},
  {"--eps0", "controller.eps0", "strict-mode cap eps0"},
  {"--rho", "controller.rho", "row subsampling factor for d"},
  {"--ratio0", "controller.ratio0", "initial tau/sigma"},
  {"--tau0", "controller.tau0", "explicit initial tau (with --sigma0)"},
  {"--sigma0", "controller.sigma0", "explicit initial sigma (with --tau0)"},
  {"--epochs", "run.epochs", "number of epochs"},
  {"--seed", "run.seed", "sampling seed"},
  {"--reference-iters", "run.reference_iters", "PDHG iterations for F* (0: skip)"},
  {"--reference-ratio", "run.reference_ratio", "step ratio for the F* run (0: automatic)"},
  {"--threshold", "run.threshold", "relative suboptimality for epochs_to_threshold"},
  {"--out", "output.root", "output root (default $ASPDHG_OUT_ROOT or ./runs)"},
  {"--name", "output.name", "output directory name"},
};

struct Common
{
  std::string config;
  std::map<std::string, std::string> overrides;
  bool nonneg = false;
  bool no_tv = false;
  bool warm_start = false;
};

void add_common(CLI::App *app, Common &c)
{
  app->add_option("--config", c.config, "INI file; flags override its values")->check(CLI::ExistingFile);
  for (auto const &f : kFlags) {
    std::string const key = f.key;
    app->add_option_function<std::string>(
      f.name, [&c, key](std::string const &v) { c.overrides[key] = v; }, f.help)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
  app->add_flag("--nonneg", c.nonneg, "constrain the image to be nonnegative");
  app->add_flag("--no-tv", c.no_tv, "drop the TV block");
  app->add_flag("--warm-start", c.warm_start, "start from the rescaled backprojection (bp-warm-start)");
}

RunSpec make_spec(Common const &c)
{
  RunSpec spec;
  if (char const *root = std::getenv("ASPDHG_OUT_ROOT"); root && *root) { spec.out_root = root; }
  if (!c.config.empty()) { apply_config(spec, parse_ini(std::filesystem::path(c.config))); }
  apply_config(spec, c.overrides);
  if (c.nonneg) { spec.nonneg = true; }
  if (c.no_tv) { spec.with_tv = false; }
  if (c.warm_start) { spec.warm_start = true; }
  return spec;
}

std::vector<std::string> split(std::string const &s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto const b = item.find_first_not_of(' ');
    if (b == std::string::npos) { continue; }
    out.push_back(item.substr(b, item.find_last_not_of(' ') - b + 1));
  }
  return out;
}

std::vector<double> parse_numbers(std::string const &s)
{
  std::vector<double> out;
  for (auto const &item : split(s)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (std::exception const &) {
      used = 0;
    }
    if (used != item.size() || used == 0) { throw ConfigError("expected a number, got '" + item + "'"); }
    out.push_back(v);
  }
  return out;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Adaptive stochastic PDHG for TV-regularized CT"};
  app.require_subcommand(1);

  Common run_opts;
  auto *run_cmd = app.add_subcommand("run", "solve one configuration");
  add_common(run_cmd, run_opts);

  Common sweep_opts;
  std::string ratios = "1e-3,1e-5,1e-7,1e-9";
  std::string rules = "fixed,a,b";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto *sweep_cmd = app.add_subcommand("sweep", "cross product of starting ratios and rules");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--ratios", ratios, "comma-separated starting ratios")->capture_default_str();
  sweep_cmd->add_option("--rules", rules, "comma-separated rules")->capture_default_str();
  sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  Common sens_opts;
  std::string param;
  std::string values;
  auto *sens_cmd = app.add_subcommand("sensitivity", "vary one controller hyperparameter");
  add_common(sens_cmd, sens_opts);
  sens_cmd->add_option("--param", param, "alpha0, eta, delta, c or s_scale")->required();
  sens_cmd->add_option("--values", values, "comma-separated values")->required();
  sens_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) { return cmd_run(make_spec(run_opts), std::cout, std::cerr); }
    if (sweep_cmd->parsed()) {
      std::vector<Rule> rule_list;
      for (auto const &r : split(rules)) { rule_list.push_back(parse_rule(r)); }
      return cmd_sweep(make_spec(sweep_opts), parse_numbers(ratios), rule_list, jobs, std::cout, std::cerr);
    }
    if (sens_cmd->parsed()) {
      return cmd_sensitivity(make_spec(sens_opts), param, parse_numbers(values), jobs, std::cout, std::cerr);
    }
  } catch (ConfigError const &e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
