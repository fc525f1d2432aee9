#pragma once

#include "aspdhg/control.hpp"
#include "aspdhg/problem.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace aspdhg {

/// Thrown when a run is requested with step sizes violating the product bound.
class InfeasibleSteps : public std::runtime_error
{
public:
  explicit InfeasibleSteps(ValidationReport rep)
    : std::runtime_error(rep.describe())
    , report(std::move(rep))
  {
  }
  ValidationReport report;
};

struct IterationRecord
{
  long k = 0;
  long epoch = 0;
  std::size_t i = 0;
  double tau = 0.0;   // step applied in this iteration
  double sigma = 0.0; // dual step of the sampled block
  double ratio = 0.0; // tau / sigma
  double v = 0.0;
  double d = 0.0; // NaN when not computed
  double w = 0.0;
  double dx_norm = 0.0;
  double objective = 0.0; // NaN except at the last iteration of an epoch
  double alpha = 0.0;     // adaptivity level used for this iteration's update
  double control = 0.0;   // bound eta^k on the relative decrease of tau and sigma here
};

struct IterationTrace
{
  std::vector<IterationRecord> records;
  double tau0 = 0.0;
  double sigma0 = 0.0;
  std::size_t n_blocks = 0;

  /// tau^0, tau^1, ... (length records + 1)
  std::vector<double> tau_series() const;
  std::vector<double> sigma_series() const;
  std::vector<double> control_series() const;
  /// (epoch index, objective) at epoch ends.
  std::vector<std::pair<long, double>> epoch_objectives() const;
};

/// CSV with header k,epoch,i,tau,sigma,ratio,v,d,w,dx_norm,objective.
void write_trace_csv(std::ostream &os, IterationTrace const &trace);

struct SolverOptions
{
  ControllerConfig controller;
  long epochs = 10;
  std::uint64_t seed = 0;
  /// Initial tau/sigma; ignored when tau0 and sigma0 are both given.
  double ratio0 = 1.0;
  std::optional<double> tau0;
  std::optional<double> sigma0;
  std::optional<Vector> x0;
  std::optional<std::vector<Vector>> y0;
  bool record_objective = true;
};

enum class RunStatus { ok, diverged };

struct RunResult
{
  Vector x;
  std::vector<Vector> y;
  IterationTrace trace;
  StepSizeState final_state;
  RunStatus status = RunStatus::ok;
  std::string message;
  /// Largest relative mismatch between the maintained A^T y and a fresh sum.
  double max_aggregate_drift = 0.0;
  double s = 0.0; // residual scale used by rule (a)
};

/**
 * Adaptive stochastic PDHG with serial sampling.
 *
 * Each iteration updates the step sizes from the previous iteration's
 * residuals, takes the primal prox step with A^T ybar, samples one dual
 * block, takes its dual prox step and extrapolates that block by 1/p_i.
 * One epoch is n_blocks iterations. Deterministic for a given seed.
 */
RunResult run(SaddleProblem const &problem, SolverOptions const &opts);

/// Residual lengths v and d for a step on block i.
struct ResidualPair
{
  double v = 0.0;
  double d = 0.0;
};

ResidualPair compute_vd(Vector const &x_prev, Vector const &x_next, Vector const &y_prev, Vector const &y_next,
                        double tau, double sigma, LinearMap const &op, double prob);

/**
 * Row-subsampled estimate of d. Every row is kept independently with
 * probability 1 / rho and the kept l1 mass is multiplied by rho; A_i dx is
 * evaluated only on kept rows when the operator exposes them.
 */
double compute_d_subsampled(Vector const &x_prev, Vector const &x_next, Vector const &y_prev,
                            Vector const &y_next, double sigma, LinearMap const &op, double prob, double rho,
                            std::mt19937_64 &rng);

/// Cosine between x_prev - x_next and the subgradient estimate q; 0 if either is ~0.
double compute_w(Vector const &x_prev, Vector const &x_next, Vector const &y_prev, Vector const &y_next,
                 double tau, LinearMap const &op, double prob);

/// Inverse-CDF draw from probs.
std::size_t sample_index(std::mt19937_64 &rng, std::vector<double> const &probs);

} // namespace aspdhg
