#pragma once

#include "aspdhg/problem.hpp"
#include "aspdhg/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace aspdhg {

/// The block operator [[a I, P^T], [P, b I]] for small dense P.
struct MetricBlock
{
  double a = 1.0;
  double b = 1.0;
  Matrix P;

  Matrix assemble() const;
};

/// Largest matrix dimension metric_min_eig accepts.
inline constexpr Index kMetricDimCap = 200;

/// Smallest eigenvalue of the assembled block (cyclic Jacobi rotations).
double metric_min_eig(MetricBlock const &block);

/// Smallest eigenvalue of [[beta a I, P^T], [P, beta b I]].
double metric_min_eig_shifted(MetricBlock const &block, double beta);

/// Eigenvalues of a symmetric matrix, ascending.
Vector jacobi_eigenvalues(Matrix a);

/// M_i^k for step sizes (tau, sigma_i), probability p_i and a dense A_i.
MetricBlock sampled_metric(double tau, double sigma, double prob, Matrix const &block_op);

struct ReferenceOptions
{
  long iters = 50000;
  /// tau / sigma; <= 0 picks the best of 10^-1 ... 10^-9 after a short pilot.
  double ratio = 0.0;
  long pilot_iters = 500;
  double product = 0.95; // tau * sigma * |A|^2
  long objective_every = 10;
};

struct ReferenceSolution
{
  Vector x;
  double f_star = 0.0;
  double ratio = 0.0;
};

/**
 * Deterministic PDHG on the unpartitioned problem (every block each
 * iteration). F* is the smallest objective seen, an upper bound on the optimum.
 */
ReferenceSolution reference_solution(SaddleProblem const &problem, ReferenceOptions const &opts = {});

inline constexpr double kSuboptGuard = 1e-12;

/// (epoch, (F - F*) / max(F*, eps)) for each epoch objective in the trace.
std::vector<std::pair<long, double>> relative_suboptimality(IterationTrace const &trace, double f_star);

/// First epoch at which the relative suboptimality reaches `threshold`, or -1.
long epochs_to_threshold(std::vector<std::pair<long, double>> const &subopt, double threshold);

/// max |log10(ratio_{k+1} / ratio_k)| over the final `window` iterations.
double ratio_stabilization(IterationTrace const &trace, std::size_t window);

/// median |dx| over the last `fraction` of iterations divided by the median over the first.
double iterate_difference_decay(IterationTrace const &trace, double fraction = 0.1);

struct SummaryRow
{
  std::string run;
  std::string rule;
  std::string mode;
  double ratio0 = 0.0;
  std::uint64_t seed = 0;
  long epochs = 0;
  std::string status;
  double final_objective = 0.0;
  double final_subopt = 0.0; // NaN without a reference
  long epochs_to_threshold = -1;
  double final_ratio = 0.0;
  double stabilization = 0.0;
};

void write_summary_header(std::ostream &os);
void write_summary_row(std::ostream &os, SummaryRow const &row);

} // namespace aspdhg
