#pragma once

#include "aspdhg/control.hpp"
#include "aspdhg/diag.hpp"
#include "aspdhg/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aspdhg {

enum class Preset { sparse_view, low_dose, limited_angle, custom };

std::string to_string(Preset preset);
Preset parse_preset(std::string const &name);

/// Label written wherever a run started from the backprojection image.
inline constexpr char const *kWarmStartLabel = "bp-warm-start";

/**
 * Everything needed to reproduce one solve. Unset optionals take the
 * preset's value (see preset_options).
 */
struct RunSpec
{
  Preset preset = Preset::sparse_view;
  ControllerConfig controller;
  double ratio0 = 1e-5;
  std::optional<double> tau0;
  std::optional<double> sigma0;
  long epochs = 200;
  Index n_batches = 5;
  std::uint64_t seed = 1;

  std::optional<double> lambda;
  std::optional<Index> grid;
  std::optional<Index> n_angles;
  std::optional<Index> n_detectors;
  std::optional<double> pixel_size;
  std::optional<double> angle_range_deg;
  std::optional<std::string> noise; // none, gaussian, poisson
  std::optional<double> sigma_rel;
  std::optional<double> dose;
  std::uint64_t data_seed = 0;
  bool nonneg = false;
  bool with_tv = true;
  double tv_prob = 0.0;

  bool warm_start = false;
  long reference_iters = 10000; // 0 skips F*
  double reference_ratio = 0.0; // <= 0: automatic
  double threshold = 1e-3;

  std::filesystem::path out_root = "runs";
  std::string name; // empty: derived from the spec
};

/// Problem options for the spec's preset with its overrides applied.
TvCtOptions preset_options(RunSpec const &spec);

/// Throws ConfigError for any out-of-range field. Does no numerical work.
void validate(RunSpec const &spec);

/// Directory name used when spec.name is empty.
std::string default_run_name(RunSpec const &spec);

/// Applies `key = value` pairs (see config_keys()). Unknown keys throw.
void apply_config(RunSpec &spec, std::map<std::string, std::string> const &kv);
std::vector<std::string> const &config_keys();

/// Writes the effective configuration in the format apply_config reads.
void write_spec_ini(std::ostream &os, RunSpec const &spec);

struct RunOutcome
{
  SummaryRow row;
  RunResult result;
  bool failed = false;
};

/// Solves one spec on an already built instance; f_star may be NaN.
RunOutcome execute(RunSpec const &spec, TvCtInstance const &inst, double f_star);

/// F* for the instance, or NaN when spec.reference_iters is 0.
double reference_value(RunSpec const &spec, TvCtInstance const &inst);

int cmd_run(RunSpec const &spec, std::ostream &out, std::ostream &err);

/// Cross product of ratios and rules; run j uses seed base.seed + j.
int cmd_sweep(RunSpec const &base, std::vector<double> const &ratios, std::vector<Rule> const &rules,
              unsigned jobs, std::ostream &out, std::ostream &err);

/// One run per value of `param` in {alpha0, eta, delta, c, s_scale}.
int cmd_sensitivity(RunSpec const &base, std::string const &param, std::vector<double> const &values,
                    unsigned jobs, std::ostream &out, std::ostream &err);

/// Throws ConfigError unless `param` is a hyperparameter of `rule`.
void check_sensitivity_param(Rule rule, std::string const &param);

} // namespace aspdhg
