#include "aspdhg/experiment.hpp"

#include "aspdhg/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace aspdhg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double parse_double(std::string const &key, std::string const &s)
{
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (std::exception const &) {
    used = 0;
  }
  if (used == 0 || used != s.size()) { throw ConfigError(key + ": expected a number, got '" + s + "'"); }
  return v;
}

long long parse_int(std::string const &key, std::string const &s)
{
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (std::exception const &) {
    used = 0;
  }
  if (used == 0 || used != s.size()) { throw ConfigError(key + ": expected an integer, got '" + s + "'"); }
  return v;
}

std::uint64_t parse_seed(std::string const &key, std::string const &s)
{
  long long const v = parse_int(key, s);
  if (v < 0) { throw ConfigError(key + ": must be >= 0"); }
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(std::string const &key, std::string const &s)
{
  if (s == "true" || s == "1" || s == "yes" || s == "on") { return true; }
  if (s == "false" || s == "0" || s == "no" || s == "off") { return false; }
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

struct KeyHandler
{
  std::string key;
  std::function<void(RunSpec &, std::string const &)> set;
};

std::vector<KeyHandler> const &handlers()
{
  static std::vector<KeyHandler> const table = [] {
    std::vector<KeyHandler> t;
    auto add = [&t](std::string key, std::function<void(RunSpec &, std::string const &)> fn) {
      t.push_back({std::move(key), std::move(fn)});
    };
    add("problem.preset", [](RunSpec &s, std::string const &v) { s.preset = parse_preset(v); });
    add("problem.lambda", [](RunSpec &s, std::string const &v) { s.lambda = parse_double("lambda", v); });
    add("problem.grid", [](RunSpec &s, std::string const &v) { s.grid = parse_int("grid", v); });
    add("problem.n_angles", [](RunSpec &s, std::string const &v) { s.n_angles = parse_int("n_angles", v); });
    add("problem.n_detectors",
        [](RunSpec &s, std::string const &v) { s.n_detectors = parse_int("n_detectors", v); });
    add("problem.pixel_size",
        [](RunSpec &s, std::string const &v) { s.pixel_size = parse_double("pixel_size", v); });
    add("problem.angle_range",
        [](RunSpec &s, std::string const &v) { s.angle_range_deg = parse_double("angle_range", v); });
    add("problem.noise", [](RunSpec &s, std::string const &v) { s.noise = v; });
    add("problem.sigma_rel", [](RunSpec &s, std::string const &v) { s.sigma_rel = parse_double("sigma_rel", v); });
    add("problem.dose", [](RunSpec &s, std::string const &v) { s.dose = parse_double("dose", v); });
    add("problem.data_seed", [](RunSpec &s, std::string const &v) { s.data_seed = parse_seed("data_seed", v); });
    add("problem.n_batches", [](RunSpec &s, std::string const &v) { s.n_batches = parse_int("n_batches", v); });
    add("problem.nonneg", [](RunSpec &s, std::string const &v) { s.nonneg = parse_bool("nonneg", v); });
    add("problem.tv", [](RunSpec &s, std::string const &v) { s.with_tv = parse_bool("tv", v); });
    add("problem.tv_prob", [](RunSpec &s, std::string const &v) { s.tv_prob = parse_double("tv_prob", v); });

    add("controller.rule", [](RunSpec &s, std::string const &v) { s.controller.rule = parse_rule(v); });
    add("controller.mode", [](RunSpec &s, std::string const &v) { s.controller.mode = parse_mode(v); });
    add("controller.alpha0",
        [](RunSpec &s, std::string const &v) { s.controller.alpha0 = parse_double("alpha0", v); });
    add("controller.eta", [](RunSpec &s, std::string const &v) { s.controller.eta = parse_double("eta", v); });
    add("controller.delta", [](RunSpec &s, std::string const &v) { s.controller.delta = parse_double("delta", v); });
    add("controller.c", [](RunSpec &s, std::string const &v) { s.controller.c = parse_double("c", v); });
    add("controller.s", [](RunSpec &s, std::string const &v) {
      s.controller.s = v == "auto" ? -1.0 : parse_double("s", v);
    });
    add("controller.s_scale",
        [](RunSpec &s, std::string const &v) { s.controller.s_scale = parse_double("s_scale", v); });
    add("controller.beta", [](RunSpec &s, std::string const &v) { s.controller.beta = parse_double("beta", v); });
    add("controller.eps0", [](RunSpec &s, std::string const &v) { s.controller.eps0 = parse_double("eps0", v); });
    add("controller.rho", [](RunSpec &s, std::string const &v) { s.controller.rho = parse_double("rho", v); });
    add("controller.ratio0", [](RunSpec &s, std::string const &v) { s.ratio0 = parse_double("ratio0", v); });
    add("controller.tau0", [](RunSpec &s, std::string const &v) { s.tau0 = parse_double("tau0", v); });
    add("controller.sigma0", [](RunSpec &s, std::string const &v) { s.sigma0 = parse_double("sigma0", v); });

    add("run.epochs", [](RunSpec &s, std::string const &v) { s.epochs = parse_int("epochs", v); });
    add("run.seed", [](RunSpec &s, std::string const &v) { s.seed = parse_seed("seed", v); });
    add("run.warm_start", [](RunSpec &s, std::string const &v) {
      s.warm_start = v == kWarmStartLabel || parse_bool("warm_start", v);
    });
    add("run.reference_iters",
        [](RunSpec &s, std::string const &v) { s.reference_iters = parse_int("reference_iters", v); });
    add("run.reference_ratio",
        [](RunSpec &s, std::string const &v) { s.reference_ratio = parse_double("reference_ratio", v); });
    add("run.threshold", [](RunSpec &s, std::string const &v) { s.threshold = parse_double("threshold", v); });

    add("output.root", [](RunSpec &s, std::string const &v) { s.out_root = v; });
    add("output.name", [](RunSpec &s, std::string const &v) { s.name = v; });
    return t;
  }();
  return table;
}

double unit_lambda(Preset preset) { return preset == Preset::low_dose ? 1.0 : 0.5; }

void write_text(std::filesystem::path const &path, std::function<void(std::ostream &)> const &fn)
{
  std::ofstream os(path);
  if (!os) { throw std::runtime_error("cannot open " + path.string() + " for writing"); }
  fn(os);
}

void write_outputs(std::filesystem::path const &dir, RunSpec const &spec, TvCtInstance const &inst,
                   RunOutcome const &outcome)
{
  std::filesystem::create_directories(dir);
  Index const side = inst.truth.side;
  auto const geom = preset_options(spec).geometry;
  write_text(dir / "trace.csv", [&](std::ostream &os) { write_trace_csv(os, outcome.result.trace); });
  write_text(dir / "summary.csv", [&](std::ostream &os) {
    write_summary_header(os);
    write_summary_row(os, outcome.row);
  });
  write_text(dir / "spec.ini", [&](std::ostream &os) { write_spec_ini(os, spec); });
  if (outcome.result.x.size() == side * side) { write_pgm(dir / "recon.pgm", outcome.result.x, side); }
  write_pgm(dir / "phantom.pgm", inst.truth.pixels, side);
  write_sinogram_csv(dir / "sinogram.csv", inst.sinogram, geom.n_angles, geom.n_detectors);
}

RunOutcome execute_safely(RunSpec const &spec, TvCtInstance const &inst, double f_star)
{
  try {
    return execute(spec, inst, f_star);
  } catch (std::exception const &e) {
    RunOutcome out;
    out.failed = true;
    out.row.run = spec.name.empty() ? default_run_name(spec) : spec.name;
    out.row.rule = to_string(spec.controller.rule);
    out.row.mode = to_string(spec.controller.mode);
    out.row.ratio0 = spec.ratio0;
    out.row.seed = spec.seed;
    out.row.epochs = spec.epochs;
    out.row.status = std::string("error: ") + e.what();
    std::replace(out.row.status.begin(), out.row.status.end(), ',', ';');
    out.row.final_objective = kNaN;
    out.row.final_subopt = kNaN;
    out.row.epochs_to_threshold = -1;
    out.row.final_ratio = kNaN;
    out.row.stabilization = kNaN;
    return out;
  }
}

// Runs the children on a shared instance with a small worker pool and writes
// the combined summary in child order.
int run_batch(std::string const &label, RunSpec const &base, std::vector<RunSpec> const &children,
              unsigned jobs, std::ostream &out, std::ostream &err)
{
  for (auto const &c : children) { validate(c); }
  TvCtInstance const inst = build_tv_ct(preset_options(base));
  for (auto const &c : children) {
    if (c.tau0 && c.sigma0) {
      auto const rep = validate_init(*c.tau0, *c.sigma0, inst.problem.block_norms(),
                                     inst.problem.probabilities(), c.controller.beta);
      if (!rep.ok) {
        err << rep.describe() << '\n';
        return 3;
      }
    }
  }
  double const f_star = reference_value(base, inst);
  std::filesystem::path const root = base.out_root / (base.name.empty() ? label : base.name);

  std::vector<RunOutcome> outcomes(children.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < children.size(); j = next++) {
      outcomes[j] = execute_safely(children[j], inst, f_star);
    }
  };
  unsigned const n_workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(children.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_workers; ++t) { pool.emplace_back(worker); }
  worker();
  for (auto &t : pool) { t.join(); }

  std::filesystem::create_directories(root);
  std::size_t n_failed = 0;
  for (std::size_t j = 0; j < children.size(); ++j) {
    write_outputs(root / outcomes[j].row.run, children[j], inst, outcomes[j]);
    if (outcomes[j].failed) { ++n_failed; }
  }
  write_text(root / "summary.csv", [&](std::ostream &os) {
    write_summary_header(os);
    for (auto const &o : outcomes) { write_summary_row(os, o.row); }
  });
  out << children.size() - n_failed << "/" << children.size() << " runs ok; summary in "
      << (root / "summary.csv").string() << '\n';
  for (auto const &o : outcomes) {
    if (o.failed) { err << o.row.run << ": " << o.row.status << '\n'; }
  }
  return n_failed == children.size() ? 1 : 0;
}

} // namespace

std::string to_string(Preset preset)
{
  switch (preset) {
  case Preset::sparse_view: return "sparse_view";
  case Preset::low_dose: return "low_dose";
  case Preset::limited_angle: return "limited_angle";
  case Preset::custom: return "custom";
  }
  return "?";
}

Preset parse_preset(std::string const &name)
{
  if (name == "sparse_view") { return Preset::sparse_view; }
  if (name == "low_dose") { return Preset::low_dose; }
  if (name == "limited_angle") { return Preset::limited_angle; }
  if (name == "custom") { return Preset::custom; }
  throw ConfigError("unknown preset '" + name + "'");
}

TvCtOptions preset_options(RunSpec const &spec)
{
  TvCtOptions o;
  o.geometry.grid = 64;
  o.geometry.n_angles = 60;
  o.geometry.n_detectors = 95;
  o.geometry.pixel_size = 50.0;
  std::string noise = "none";
  double dose = 50.0;
  switch (spec.preset) {
  case Preset::sparse_view: o.geometry.n_angles = 20; break;
  case Preset::low_dose: noise = "poisson"; break;
  case Preset::limited_angle:
    o.geometry.n_angles = 50;
    o.geometry.angle_range_deg = 150.0;
    break;
  case Preset::custom: break;
  }
  if (spec.grid) { o.geometry.grid = *spec.grid; }
  if (spec.n_angles) { o.geometry.n_angles = *spec.n_angles; }
  if (spec.n_detectors) { o.geometry.n_detectors = *spec.n_detectors; }
  if (spec.pixel_size) { o.geometry.pixel_size = *spec.pixel_size; }
  if (spec.angle_range_deg) { o.geometry.angle_range_deg = *spec.angle_range_deg; }
  if (spec.noise) { noise = *spec.noise; }
  if (spec.dose) { dose = *spec.dose; }

  // Default weight keeps the minimizer independent of pixel_size.
  double const ps = o.geometry.pixel_size;
  o.lambda = spec.lambda ? *spec.lambda : unit_lambda(spec.preset) * ps * ps;
  o.with_tv = spec.with_tv;
  o.n_batches = spec.n_batches;
  o.tv_prob = spec.tv_prob;
  o.g = spec.nonneg ? PrimalKind::nonneg_indicator : PrimalKind::zero;
  o.noise.seed = spec.data_seed;
  if (noise == "gaussian") {
    o.noise.kind = NoiseSpec::Kind::gaussian;
    o.noise.sigma_rel = spec.sigma_rel.value_or(0.01);
  } else if (noise == "poisson") {
    o.noise.kind = NoiseSpec::Kind::scaled_poisson;
    o.noise.dose = dose;
  } else {
    o.noise.kind = NoiseSpec::Kind::none;
  }
  o.seed = spec.data_seed;
  return o;
}

void validate(RunSpec const &spec)
{
  spec.controller.validate();
  if (!(spec.ratio0 > 0.0) || !std::isfinite(spec.ratio0)) { throw ConfigError("ratio0 must be a positive number"); }
  if (spec.tau0.has_value() != spec.sigma0.has_value()) {
    throw ConfigError("tau0 and sigma0 must be given together");
  }
  if (spec.tau0 && !(*spec.tau0 > 0.0 && *spec.sigma0 > 0.0)) { throw ConfigError("tau0 and sigma0 must be positive"); }
  if (spec.epochs < 1) { throw ConfigError("epochs must be >= 1"); }
  if (spec.n_batches < 1) { throw ConfigError("n_batches must be >= 1"); }
  if (spec.lambda && !(*spec.lambda > 0.0)) { throw ConfigError("lambda must be > 0"); }
  if (spec.grid && *spec.grid < 8) { throw ConfigError("grid must be >= 8"); }
  if (spec.n_angles && *spec.n_angles < 1) { throw ConfigError("n_angles must be >= 1"); }
  if (spec.n_detectors && *spec.n_detectors < 1) { throw ConfigError("n_detectors must be >= 1"); }
  if (spec.pixel_size && !(*spec.pixel_size > 0.0)) { throw ConfigError("pixel_size must be > 0"); }
  if (spec.angle_range_deg && !(*spec.angle_range_deg > 0.0)) { throw ConfigError("angle_range must be > 0"); }
  if (spec.noise && *spec.noise != "none" && *spec.noise != "gaussian" && *spec.noise != "poisson") {
    throw ConfigError("noise must be none, gaussian or poisson");
  }
  if (spec.sigma_rel && !(*spec.sigma_rel >= 0.0)) { throw ConfigError("sigma_rel must be >= 0"); }
  if (spec.dose && !(*spec.dose > 0.0)) { throw ConfigError("dose must be > 0"); }
  if (!(spec.tv_prob >= 0.0 && spec.tv_prob < 1.0)) { throw ConfigError("tv_prob must lie in [0,1)"); }
  if (spec.reference_iters < 0) { throw ConfigError("reference_iters must be >= 0"); }
  if (!(spec.threshold > 0.0)) { throw ConfigError("threshold must be > 0"); }
  if (spec.name.find('/') != std::string::npos) { throw ConfigError("name must not contain '/'"); }
  auto const o = preset_options(spec);
  if (o.n_batches > o.geometry.n_angles) { throw ConfigError("n_batches must not exceed n_angles"); }
}

std::string default_run_name(RunSpec const &spec)
{
  std::string name = to_string(spec.preset) + "-" + to_string(spec.controller.rule);
  if (spec.controller.rule != Rule::fixed) { name += "-" + to_string(spec.controller.mode); }
  name += "-r" + short_fmt(spec.ratio0) + "-s" + std::to_string(spec.seed);
  if (spec.warm_start) { name += std::string("-") + kWarmStartLabel; }
  return name;
}

void apply_config(RunSpec &spec, std::map<std::string, std::string> const &kv)
{
  for (auto const &[key, value] : kv) {
    auto const &t = handlers();
    auto it = std::find_if(t.begin(), t.end(), [&](KeyHandler const &h) { return h.key == key; });
    if (it == t.end()) { throw ConfigError("unknown config key '" + key + "'"); }
    it->set(spec, value);
  }
}

std::vector<std::string> const &config_keys()
{
  static std::vector<std::string> const keys = [] {
    std::vector<std::string> k;
    for (auto const &h : handlers()) { k.push_back(h.key); }
    return k;
  }();
  return keys;
}

void write_spec_ini(std::ostream &os, RunSpec const &spec)
{
  auto const o = preset_options(spec);
  auto const &c = spec.controller;
  char const *noise = o.noise.kind == NoiseSpec::Kind::none       ? "none"
                      : o.noise.kind == NoiseSpec::Kind::gaussian ? "gaussian"
                                                                  : "poisson";
  os << "[problem]\n";
  os << "preset = " << to_string(spec.preset) << '\n';
  os << "lambda = " << fmt(o.lambda) << '\n';
  os << "grid = " << o.geometry.grid << '\n';
  os << "n_angles = " << o.geometry.n_angles << '\n';
  os << "n_detectors = " << o.geometry.n_detectors << '\n';
  os << "pixel_size = " << fmt(o.geometry.pixel_size) << '\n';
  os << "angle_range = " << fmt(o.geometry.angle_range_deg) << '\n';
  os << "noise = " << noise << '\n';
  if (o.noise.kind == NoiseSpec::Kind::gaussian) { os << "sigma_rel = " << fmt(o.noise.sigma_rel) << '\n'; }
  if (o.noise.kind == NoiseSpec::Kind::scaled_poisson) { os << "dose = " << fmt(o.noise.dose) << '\n'; }
  os << "data_seed = " << spec.data_seed << '\n';
  os << "n_batches = " << spec.n_batches << '\n';
  os << "nonneg = " << (spec.nonneg ? "true" : "false") << '\n';
  os << "tv = " << (spec.with_tv ? "true" : "false") << '\n';
  os << "tv_prob = " << fmt(spec.tv_prob) << '\n';
  os << "\n[controller]\n";
  os << "rule = " << to_string(c.rule) << '\n';
  os << "mode = " << to_string(c.mode) << '\n';
  os << "alpha0 = " << fmt(c.alpha0_or_default()) << '\n';
  os << "eta = " << fmt(c.eta_or_default()) << '\n';
  os << "delta = " << fmt(c.delta) << '\n';
  os << "c = " << fmt(c.c) << '\n';
  os << "s = " << (c.s > 0.0 ? fmt(c.s) : std::string("auto")) << '\n';
  os << "s_scale = " << fmt(c.s_scale) << '\n';
  os << "beta = " << fmt(c.beta) << '\n';
  os << "eps0 = " << fmt(c.eps0) << '\n';
  os << "rho = " << fmt(c.rho) << '\n';
  os << "ratio0 = " << fmt(spec.ratio0) << '\n';
  if (spec.tau0) { os << "tau0 = " << fmt(*spec.tau0) << "\nsigma0 = " << fmt(*spec.sigma0) << '\n'; }
  os << "\n[run]\n";
  os << "epochs = " << spec.epochs << '\n';
  os << "seed = " << spec.seed << '\n';
  os << "warm_start = " << (spec.warm_start ? kWarmStartLabel : "false") << '\n';
  os << "reference_iters = " << spec.reference_iters << '\n';
  os << "reference_ratio = " << fmt(spec.reference_ratio) << '\n';
  os << "threshold = " << fmt(spec.threshold) << '\n';
}

double reference_value(RunSpec const &spec, TvCtInstance const &inst)
{
  if (spec.reference_iters == 0) { return kNaN; }
  ReferenceOptions ro;
  ro.iters = spec.reference_iters;
  ro.ratio = spec.reference_ratio;
  ro.pilot_iters = std::min<long>(500, spec.reference_iters);
  return reference_solution(inst.problem, ro).f_star;
}

RunOutcome execute(RunSpec const &spec, TvCtInstance const &inst, double f_star)
{
  SolverOptions so;
  so.controller = spec.controller;
  so.epochs = spec.epochs;
  so.seed = spec.seed;
  so.ratio0 = spec.ratio0;
  so.tau0 = spec.tau0;
  so.sigma0 = spec.sigma0;
  if (spec.warm_start) { so.x0 = backprojection_warm_start(inst); }

  RunOutcome out;
  out.result = run(inst.problem, so);
  auto const &trace = out.result.trace;
  out.failed = out.result.status != RunStatus::ok;

  SummaryRow &row = out.row;
  row.run = spec.name.empty() ? default_run_name(spec) : spec.name;
  row.rule = to_string(spec.controller.rule);
  row.mode = to_string(spec.controller.mode);
  row.ratio0 = spec.tau0 ? *spec.tau0 / *spec.sigma0 : spec.ratio0;
  row.seed = spec.seed;
  row.epochs = spec.epochs;
  row.status = out.failed ? "diverged" : "ok";
  auto const objs = trace.epoch_objectives();
  row.final_objective = objs.empty() ? kNaN : objs.back().second;
  row.final_subopt = kNaN;
  row.epochs_to_threshold = -1;
  if (std::isfinite(f_star) && !objs.empty()) {
    auto const sub = relative_suboptimality(trace, f_star);
    row.final_subopt = sub.back().second;
    row.epochs_to_threshold = epochs_to_threshold(sub, spec.threshold);
  }
  row.final_ratio = trace.records.empty() ? kNaN : trace.records.back().ratio;
  row.stabilization = trace.records.size() >= trace.n_blocks && trace.n_blocks > 0
                        ? ratio_stabilization(trace, trace.n_blocks)
                        : kNaN;
  return out;
}

int cmd_run(RunSpec const &spec, std::ostream &out, std::ostream &err)
{
  try {
    validate(spec);
    TvCtInstance const inst = build_tv_ct(preset_options(spec));
    if (spec.tau0 && spec.sigma0) {
      auto const rep = validate_init(*spec.tau0, *spec.sigma0, inst.problem.block_norms(),
                                     inst.problem.probabilities(), spec.controller.beta);
      if (!rep.ok) {
        err << rep.describe() << '\n';
        return 3;
      }
    }
    double const f_star = reference_value(spec, inst);
    RunOutcome const outcome = execute(spec, inst, f_star);
    std::filesystem::path const dir = spec.out_root / outcome.row.run;
    write_outputs(dir, spec, inst, outcome);
    out << outcome.row.run << ": " << outcome.row.status << ", final objective " << outcome.row.final_objective
        << ", relative suboptimality " << outcome.row.final_subopt << ", final ratio " << outcome.row.final_ratio
        << '\n';
    if (outcome.failed) {
      err << outcome.result.message << '\n';
      return 1;
    }
    return 0;
  } catch (ConfigError const &e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (std::exception const &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_sweep(RunSpec const &base, std::vector<double> const &ratios, std::vector<Rule> const &rules,
              unsigned jobs, std::ostream &out, std::ostream &err)
{
  if (ratios.empty() || rules.empty()) {
    err << "warning: nothing to sweep (empty ratio or rule list)\n";
    return 0;
  }
  try {
    validate(base);
    std::vector<RunSpec> children;
    for (Rule rule : rules) {
      for (double r : ratios) {
        RunSpec c = base;
        c.controller.rule = rule;
        c.ratio0 = r;
        c.tau0.reset();
        c.sigma0.reset();
        c.seed = base.seed + children.size();
        c.name.clear();
        children.push_back(std::move(c));
      }
    }
    return run_batch("sweep-" + to_string(base.preset), base, children, jobs, out, err);
  } catch (ConfigError const &e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (std::exception const &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

void check_sensitivity_param(Rule rule, std::string const &param)
{
  if (rule == Rule::fixed) { throw ConfigError("the fixed controller has no hyperparameters to vary"); }
  if (param == "alpha0" || param == "eta") { return; }
  if (param == "delta" || param == "s_scale") {
    if (rule == Rule::a) { return; }
    throw ConfigError(param + " is not a parameter of rule b");
  }
  if (param == "c") {
    if (rule == Rule::b) { return; }
    throw ConfigError("c is not a parameter of rule a");
  }
  throw ConfigError("unknown sensitivity parameter '" + param + "' (expected alpha0, eta, delta, c or s_scale)");
}

int cmd_sensitivity(RunSpec const &base, std::string const &param, std::vector<double> const &values,
                    unsigned jobs, std::ostream &out, std::ostream &err)
{
  try {
    check_sensitivity_param(base.controller.rule, param);
    validate(base);
    if (values.empty()) {
      err << "warning: no values given\n";
      return 0;
    }
    std::vector<RunSpec> children;
    for (double v : values) {
      RunSpec c = base;
      auto &cc = c.controller;
      if (param == "alpha0") { cc.alpha0 = v; }
      if (param == "eta") { cc.eta = v; }
      if (param == "delta") { cc.delta = v; }
      if (param == "c") { cc.c = v; }
      if (param == "s_scale") { cc.s_scale = v; }
      c.name = default_run_name(c) + "-" + param + "-" + short_fmt(v);
      children.push_back(std::move(c));
    }
    return run_batch("sensitivity-" + param, base, children, jobs, out, err);
  } catch (ConfigError const &e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (std::exception const &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace aspdhg
