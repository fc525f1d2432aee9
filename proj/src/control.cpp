#include "aspdhg/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aspdhg {

std::string to_string(Rule rule)
{
  switch (rule) {
  case Rule::fixed: return "fixed";
  case Rule::a: return "a";
  case Rule::b: return "b";
  }
  return "?";
}

std::string to_string(Mode mode) { return mode == Mode::paper ? "paper" : "strict"; }

Rule parse_rule(std::string const &name)
{
  if (name == "fixed") { return Rule::fixed; }
  if (name == "a" || name == "rule_a") { return Rule::a; }
  if (name == "b" || name == "rule_b") { return Rule::b; }
  throw ConfigError("unknown rule '" + name + "' (expected fixed, a or b)");
}

Mode parse_mode(std::string const &name)
{
  if (name == "paper") { return Mode::paper; }
  if (name == "strict") { return Mode::strict; }
  throw ConfigError("unknown mode '" + name + "' (expected paper or strict)");
}

double ControllerConfig::alpha0_or_default() const
{
  if (alpha0 > 0.0) { return alpha0; }
  return rule == Rule::b ? 1.0 : 0.5;
}

double ControllerConfig::eta_or_default() const
{
  if (eta > 0.0) { return eta; }
  return rule == Rule::b ? 0.99 : 0.995;
}

void ControllerConfig::validate() const
{
  if (!(beta > 0.0 && beta < 1.0)) { throw ConfigError("beta must lie in (0,1)"); }
  double const e = eta_or_default();
  if (!(e > 0.0 && e < 1.0)) { throw ConfigError("eta must lie in (0,1)"); }
  double const a0 = alpha0_or_default();
  if (rule == Rule::a && !(a0 > 0.0 && a0 < 1.0)) { throw ConfigError("alpha0 must lie in (0,1) for rule a"); }
  if (rule == Rule::b && !(a0 > 0.0)) { throw ConfigError("alpha0 must be positive for rule b"); }
  if (!(delta > 1.0)) { throw ConfigError("delta must be > 1"); }
  if (!(c > 0.0 && c < 1.0)) { throw ConfigError("c must lie in (0,1)"); }
  if (!(s_scale > 0.0)) { throw ConfigError("s_scale must be positive"); }
  if (!(eps0 >= 0.0 && eps0 < 1.0)) { throw ConfigError("eps0 must lie in [0,1)"); }
  if (!(rho >= 1.0)) { throw ConfigError("rho must be >= 1"); }
}

double step_product(double tau, std::span<double const> sigma, std::span<double const> norms,
                    std::span<double const> probs)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    worst = std::max(worst, tau * sigma[i] * norms[i] * norms[i] / probs[i]);
  }
  return worst;
}

std::string ValidationReport::describe() const
{
  std::ostringstream os;
  os.precision(6);
  if (ok) {
    os << "step sizes feasible: max_i tau*sigma*|A_i|^2/p_i = " << max_product << " <= beta = " << beta;
  } else {
    os << "step sizes infeasible: block " << worst_block << " has tau*sigma*|A_i|^2/p_i = " << max_product
       << " > beta = " << beta << "; largest feasible sigma0 for this tau0 is " << max_feasible_sigma;
  }
  return os.str();
}

ValidationReport validate_init(double tau0, double sigma0, std::span<double const> norms,
                               std::span<double const> probs, double beta)
{
  if (!(beta > 0.0 && beta < 1.0)) { throw ConfigError("validate_init: beta must lie in (0,1)"); }
  if (!(tau0 > 0.0) || !(sigma0 > 0.0)) { throw ConfigError("validate_init: step sizes must be positive"); }
  if (norms.size() != probs.size() || norms.empty()) { throw ConfigError("validate_init: block data mismatch"); }

  ValidationReport rep;
  rep.beta = beta;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < norms.size(); ++i) {
    double const prod = tau0 * sigma0 * norms[i] * norms[i] / probs[i];
    if (prod > rep.max_product) {
      rep.max_product = prod;
      rep.worst_block = i;
    }
    if (norms[i] > 0.0) { min_ratio = std::min(min_ratio, probs[i] / (norms[i] * norms[i])); }
  }
  rep.ok = rep.max_product <= beta;
  rep.max_feasible_sigma = beta * min_ratio / tau0;
  return rep;
}

std::pair<double, double> initial_steps(double ratio, std::span<double const> norms,
                                        std::span<double const> probs, double beta)
{
  if (!(ratio > 0.0) || !std::isfinite(ratio)) { throw ConfigError("initial step ratio must be positive"); }
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] > 0.0) { min_ratio = std::min(min_ratio, probs[i] / (norms[i] * norms[i])); }
  }
  if (!std::isfinite(min_ratio)) { min_ratio = 1.0; }
  double const tau = std::sqrt(beta * ratio * min_ratio);
  double sigma = tau / ratio;
  // Land on the feasible side of the boundary despite rounding.
  std::vector<double> sig(norms.size(), sigma);
  while (step_product(tau, sig, norms, probs) > beta) {
    sigma = std::nextafter(sigma, 0.0);
    std::fill(sig.begin(), sig.end(), sigma);
  }
  return {tau, sigma};
}

double gamma_clamp(double gamma, double eps)
{
  if (!(gamma > 0.0)) { throw ConfigError("gamma_clamp: gamma must be positive"); }
  if (!(eps >= 0.0 && eps < 1.0)) { throw ConfigError("gamma_clamp: eps must lie in [0,1)"); }
  return std::clamp(gamma, 1.0 - eps, 1.0 / (1.0 - eps));
}

void enforce_feasibility(StepSizeState &state, std::span<double const> norms, std::span<double const> probs,
                         double beta)
{
  double prod = step_product(state.tau, state.sigma, norms, probs);
  if (prod <= beta) { return; }
  double const scale = beta / prod;
  for (auto &s : state.sigma) { s *= scale; }
  while (step_product(state.tau, state.sigma, norms, probs) > beta) {
    for (auto &s : state.sigma) { s = std::nextafter(s, 0.0); }
  }
}

StepSizeState balance(StepSizeState state, double gamma, Safeguard const *guard)
{
  if (guard) { gamma = gamma_clamp(gamma, guard->eps); }
  state.tau /= gamma;
  for (auto &s : state.sigma) { s *= gamma; }
  if (guard) { enforce_feasibility(state, guard->norms, guard->probs, guard->beta); }
  return state;
}

namespace {

// Applies tau <- tau / x, sigma <- sigma * x (tau_divides) or tau <- tau * x,
// sigma <- sigma / x, using the literal update expressions unless the strict
// clamp alters the factor.
StepSizeState changed(StepSizeState state, double x, bool tau_divides, double eta, Safeguard const *guard)
{
  double const gamma = tau_divides ? x : 1.0 / x;
  if (guard && gamma_clamp(gamma, guard->eps) != gamma) {
    state = balance(std::move(state), gamma, guard);
  } else {
    if (tau_divides) {
      state.tau /= x;
      for (auto &s : state.sigma) { s *= x; }
    } else {
      state.tau *= x;
      for (auto &s : state.sigma) { s /= x; }
    }
    if (guard) { enforce_feasibility(state, guard->norms, guard->probs, guard->beta); }
  }
  state.alpha *= eta;
  ++state.change_count;
  return state;
}

} // namespace

StepSizeState rule_a_step(StepSizeState state, double v, double d, double s, double delta, double eta,
                          Safeguard const *guard)
{
  double const alpha = state.alpha;
  if (v > s * d * delta) { return changed(std::move(state), 1.0 - alpha, true, eta, guard); }
  if (v < s * d / delta) { return changed(std::move(state), 1.0 - alpha, false, eta, guard); }
  return state;
}

StepSizeState rule_b_step(StepSizeState state, double w, double c, double eta, Safeguard const *guard)
{
  double const alpha = state.alpha;
  if (w < 0.0) { return changed(std::move(state), 1.0 + alpha, true, eta, guard); }
  if (w >= c) { return changed(std::move(state), 1.0 + alpha, false, eta, guard); }
  return state;
}

double strict_eps(double eps0, double decay, long k)
{
  return eps0 * std::pow(decay, static_cast<double>(k));
}

std::optional<std::size_t> audit_quasi_increase(std::span<double const> u, std::span<double const> control)
{
  constexpr double kSlack = 8 * std::numeric_limits<double>::epsilon();
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    double const eta = j < control.size() ? control[j] : 0.0;
    if (u[j + 1] < (1.0 - eta) * u[j] * (1.0 - kSlack)) { return j; }
  }
  return std::nullopt;
}

} // namespace aspdhg
