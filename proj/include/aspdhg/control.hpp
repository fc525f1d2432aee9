#pragma once

#include "aspdhg/linop.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aspdhg {

enum class Rule { fixed, a, b };
enum class Mode { paper, strict };

std::string to_string(Rule rule);
std::string to_string(Mode mode);
Rule parse_rule(std::string const &name);
Mode parse_mode(std::string const &name);

/// Controller hyperparameters. Negative values select the rule's default.
struct ControllerConfig
{
  Rule rule = Rule::fixed;
  Mode mode = Mode::paper;
  double alpha0 = -1.0; // 0.5 for rule (a), 1 for rule (b)
  double eta = -1.0;    // 0.995 for rule (a), 0.99 for rule (b)
  double delta = 1.5;
  double c = 0.999;
  double s = -1.0; // residual scale for rule (a); default |A|
  double s_scale = 1.0;
  double beta = 0.999;
  // Strict mode cap eps^k = eps0 * eta^k.
  double eps0 = 0.5;
  // Row subsampling factor for d in rule (a); 1 computes d exactly.
  double rho = 10.0;

  double alpha0_or_default() const;
  double eta_or_default() const;
  /// Throws ConfigError on out-of-range hyperparameters.
  void validate() const;
};

struct StepSizeState
{
  double tau = 0.0;
  std::vector<double> sigma; // per dual block; the adaptive rules keep them equal
  double alpha = 0.0;
  long k = 0;
  long change_count = 0;
};

/// max_i tau * sigma_i * |A_i|^2 / p_i
double step_product(double tau, std::span<double const> sigma, std::span<double const> norms,
                    std::span<double const> probs);

struct ValidationReport
{
  bool ok = true;
  double max_product = 0.0;
  std::size_t worst_block = 0;
  double beta = 0.0;
  /// Largest shared sigma0 that satisfies the bound for the given tau0.
  double max_feasible_sigma = 0.0;

  std::string describe() const;
};

ValidationReport validate_init(double tau0, double sigma0, std::span<double const> norms,
                               std::span<double const> probs, double beta);

/// Initial steps for a requested ratio tau0/sigma0 = ratio, placed on the
/// boundary tau0 * sigma0 = beta * min_i p_i / |A_i|^2.
std::pair<double, double> initial_steps(double ratio, std::span<double const> norms,
                                        std::span<double const> probs, double beta);

/// Clamp gamma into [1 - eps, 1 / (1 - eps)].
double gamma_clamp(double gamma, double eps);

/// Strict-mode context: the deterministic cap for this iteration and the data
/// needed to re-check feasibility.
struct Safeguard
{
  double eps = 0.0;
  std::span<double const> norms;
  std::span<double const> probs;
  double beta = 0.999;
};

/// tau <- tau / gamma, sigma_i <- gamma * sigma_i, with optional strict clamp.
StepSizeState balance(StepSizeState state, double gamma, Safeguard const *guard);

/// Residual balancing (rule (a)); v, d from the previous iteration.
StepSizeState rule_a_step(StepSizeState state, double v, double d, double s, double delta, double eta,
                          Safeguard const *guard = nullptr);

/// Angle alignment (rule (b)); w from the previous iteration.
StepSizeState rule_b_step(StepSizeState state, double w, double c, double eta,
                          Safeguard const *guard = nullptr);

/// Shrinks sigma (by whole ulps if needed) until max product <= beta.
void enforce_feasibility(StepSizeState &state, std::span<double const> norms,
                         std::span<double const> probs, double beta);

/// Strict-mode cap eps^k = eps0 * decay^k.
double strict_eps(double eps0, double decay, long k);

/**
 * Checks u[j+1] >= (1 - control[j]) * u[j] for every j.
 *
 * Returns the first violating j, or nothing when the sequence passes. A
 * relative slack of a few ulps absorbs rounding in the multiplicative updates.
 */
std::optional<std::size_t> audit_quasi_increase(std::span<double const> u, std::span<double const> control);

} // namespace aspdhg
