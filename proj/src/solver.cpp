#include "aspdhg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace aspdhg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTinyNorm = 1e-14;
// Separate stream for row masks so sampling does not depend on the rule.
constexpr std::uint64_t kMaskStream = 0x9E3779B97F4A7C15ULL;

double uniform01(std::mt19937_64 &rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double cosine(Vector const &a, Vector const &b)
{
  double const na = a.norm();
  double const nb = b.norm();
  if (na < kTinyNorm || nb < kTinyNorm) { return 0.0; }
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

// dx = x_prev - x_next, at_dy_over_p = A_i^T (y_next - y_prev) / p_i
Vector subgradient_estimate(Vector const &dx, Vector const &at_dy_over_p, double tau)
{
  return dx / tau + at_dy_over_p;
}

// d from the dual change dy = y_next - y_prev and A_i dx.
double dual_residual(Vector const &dy, Vector const &a_dx, double sigma, double prob)
{
  return (-dy / sigma - a_dx).lpNorm<1>() / prob;
}

double subsampled_dual_residual(Vector const &dy, Vector const &dx, double sigma, LinearMap const &op,
                                double prob, double rho, std::mt19937_64 &rng)
{
  if (rho == 1.0) { return dual_residual(dy, op.apply(dx), sigma, prob); }
  double const keep = 1.0 / rho;
  double acc = 0.0;
  if (op.has_rows()) {
    for (Index r = 0; r < dy.size(); ++r) {
      if (uniform01(rng) < keep) { acc += std::abs(-dy[r] / sigma - op.apply_row(r, dx)); }
    }
  } else {
    Vector const a_dx = op.apply(dx);
    for (Index r = 0; r < dy.size(); ++r) {
      if (uniform01(rng) < keep) { acc += std::abs(-dy[r] / sigma - a_dx[r]); }
    }
  }
  return rho / prob * acc;
}

void check_block_dims(Vector const &xp, Vector const &xn, Vector const &yp, Vector const &yn, LinearMap const &op)
{
  if (xp.size() != op.domain_dim() || xn.size() != op.domain_dim() || yp.size() != op.range_dim() ||
      yn.size() != op.range_dim()) {
    throw ConfigError("residual: dimension mismatch");
  }
}

std::string fmt_double(double v)
{
  if (std::isnan(v)) { return {}; }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::vector<double> IterationTrace::tau_series() const
{
  std::vector<double> out{tau0};
  for (auto const &r : records) { out.push_back(r.tau); }
  return out;
}

std::vector<double> IterationTrace::sigma_series() const
{
  std::vector<double> out{sigma0};
  for (auto const &r : records) { out.push_back(r.sigma); }
  return out;
}

std::vector<double> IterationTrace::control_series() const
{
  std::vector<double> out;
  for (auto const &r : records) { out.push_back(r.control); }
  return out;
}

std::vector<std::pair<long, double>> IterationTrace::epoch_objectives() const
{
  std::vector<std::pair<long, double>> out;
  for (auto const &r : records) {
    if (!std::isnan(r.objective)) { out.emplace_back(r.epoch, r.objective); }
  }
  return out;
}

void write_trace_csv(std::ostream &os, IterationTrace const &trace)
{
  os << "k,epoch,i,tau,sigma,ratio,v,d,w,dx_norm,objective\n";
  for (auto const &r : trace.records) {
    os << r.k << ',' << r.epoch << ',' << r.i << ',' << fmt_double(r.tau) << ',' << fmt_double(r.sigma) << ','
       << fmt_double(r.ratio) << ',' << fmt_double(r.v) << ',' << fmt_double(r.d) << ',' << fmt_double(r.w)
       << ',' << fmt_double(r.dx_norm) << ',' << fmt_double(r.objective) << '\n';
  }
}

ResidualPair compute_vd(Vector const &x_prev, Vector const &x_next, Vector const &y_prev, Vector const &y_next,
                        double tau, double sigma, LinearMap const &op, double prob)
{
  check_block_dims(x_prev, x_next, y_prev, y_next, op);
  Vector const dx = x_prev - x_next;
  Vector const dy = y_next - y_prev;
  Vector const q = subgradient_estimate(dx, op.adjoint(dy) / prob, tau);
  return {q.lpNorm<1>(), dual_residual(dy, op.apply(dx), sigma, prob)};
}

double compute_d_subsampled(Vector const &x_prev, Vector const &x_next, Vector const &y_prev,
                            Vector const &y_next, double sigma, LinearMap const &op, double prob, double rho,
                            std::mt19937_64 &rng)
{
  if (!(rho >= 1.0)) { throw ConfigError("compute_d_subsampled: rho must be >= 1"); }
  check_block_dims(x_prev, x_next, y_prev, y_next, op);
  return subsampled_dual_residual(y_next - y_prev, x_prev - x_next, sigma, op, prob, rho, rng);
}

double compute_w(Vector const &x_prev, Vector const &x_next, Vector const &y_prev, Vector const &y_next,
                 double tau, LinearMap const &op, double prob)
{
  check_block_dims(x_prev, x_next, y_prev, y_next, op);
  Vector const dx = x_prev - x_next;
  Vector const q = subgradient_estimate(dx, op.adjoint(y_next - y_prev) / prob, tau);
  return cosine(dx, q);
}

std::size_t sample_index(std::mt19937_64 &rng, std::vector<double> const &probs)
{
  double const u = uniform01(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) { return i; }
  }
  return probs.size() - 1;
}

RunResult run(SaddleProblem const &problem, SolverOptions const &opts)
{
  problem.validate();
  auto const &cfg = opts.controller;
  cfg.validate();
  if (opts.epochs < 0) { throw ConfigError("run: epochs must be >= 0"); }

  std::size_t const nb = problem.blocks.size();
  std::vector<double> const probs = problem.probabilities();
  std::vector<double> const norms = problem.block_norms();

  double tau0 = 0.0;
  double sigma0 = 0.0;
  if (opts.tau0 && opts.sigma0) {
    tau0 = *opts.tau0;
    sigma0 = *opts.sigma0;
  } else {
    std::tie(tau0, sigma0) = initial_steps(opts.ratio0, norms, probs, cfg.beta);
  }
  auto const report = validate_init(tau0, sigma0, norms, probs, cfg.beta);
  if (!report.ok) { throw InfeasibleSteps(report); }

  RunResult res;
  if (cfg.rule == Rule::a) {
    res.s = cfg.s > 0.0 ? cfg.s : estimate_norm(problem.full_operator());
    res.s *= cfg.s_scale;
  }
  double const eta = cfg.eta_or_default();

  StepSizeState state;
  state.tau = tau0;
  state.sigma.assign(nb, sigma0);
  state.alpha = cfg.alpha0_or_default();

  Vector x = opts.x0 ? *opts.x0 : Vector::Zero(problem.primal_dim);
  if (x.size() != problem.primal_dim) { throw ConfigError("run: x0 dimension mismatch"); }
  std::vector<Vector> y;
  if (opts.y0) {
    y = *opts.y0;
    if (y.size() != nb) { throw ConfigError("run: y0 block count mismatch"); }
  } else {
    for (auto const &b : problem.blocks) { y.push_back(Vector::Zero(b.op.range_dim())); }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    if (y[i].size() != problem.blocks[i].op.range_dim()) { throw ConfigError("run: y0 dimension mismatch"); }
  }

  auto fresh_aggregate = [&] {
    Vector acc = Vector::Zero(problem.primal_dim);
    for (std::size_t i = 0; i < nb; ++i) { acc += problem.blocks[i].op.adjoint(y[i]); }
    return acc;
  };
  // A^T y, and A^T ybar = A^T y + extrapolation of the last updated block.
  Vector aty = fresh_aggregate();
  Vector extrap = Vector::Zero(problem.primal_dim);
  Vector zbar = aty;

  std::mt19937_64 rng(opts.seed);
  std::mt19937_64 mask_rng(opts.seed ^ kMaskStream);

  res.trace.tau0 = tau0;
  res.trace.sigma0 = sigma0;
  res.trace.n_blocks = nb;
  long const total = opts.epochs * static_cast<long>(nb);
  res.trace.records.reserve(static_cast<std::size_t>(total));

  double v_prev = 0.0;
  double d_prev = 0.0;
  double w_prev = 0.0;

  for (long k = 0; k < total; ++k) {
    state.k = k;
    IterationRecord rec;
    rec.k = k;
    rec.epoch = k / static_cast<long>(nb);
    rec.alpha = state.alpha;

    // Step-size update from the previous iteration's residuals.
    Safeguard guard{strict_eps(cfg.eps0, eta, k), norms, probs, cfg.beta};
    Safeguard const *g = cfg.mode == Mode::strict ? &guard : nullptr;
    switch (cfg.rule) {
    case Rule::fixed: rec.control = 0.0; break;
    case Rule::a:
      rec.control = g ? guard.eps : state.alpha;
      state = rule_a_step(std::move(state), v_prev, d_prev, res.s, cfg.delta, eta, g);
      break;
    case Rule::b:
      rec.control = g ? guard.eps : state.alpha;
      state = rule_b_step(std::move(state), w_prev, cfg.c, eta, g);
      break;
    }
    enforce_feasibility(state, norms, probs, cfg.beta);
    double const tau = state.tau;

    // Primal step.
    Vector x_next = prox_primal(x - tau * zbar, tau, problem.g);

    // Dual step on one sampled block.
    std::size_t const i = sample_index(rng, probs);
    auto const &blk = problem.blocks[i];
    double const sigma = state.sigma[i];
    double const p = blk.prob;
    Vector y_next = blk.conj.prox(y[i] + sigma * blk.op.apply(x_next), sigma);
    Vector const dy = y_next - y[i];
    Vector const at_dy = blk.op.adjoint(dy);

    // Extrapolation: ybar_i = y_i^{k+1} + (y_i^{k+1} - y_i^k) / p_i, others reset to y.
    aty += at_dy;
    extrap = at_dy / p;
    zbar = aty + extrap;

    Vector const dx = x - x_next;
    Vector const q = subgradient_estimate(dx, extrap, tau);
    rec.i = i;
    rec.tau = tau;
    rec.sigma = sigma;
    rec.ratio = tau / sigma;
    rec.v = q.lpNorm<1>();
    rec.w = cosine(dx, q);
    rec.d = kNaN;
    if (cfg.rule == Rule::a) { rec.d = subsampled_dual_residual(dy, dx, sigma, blk.op, p, cfg.rho, mask_rng); }
    rec.dx_norm = dx.norm();
    rec.objective = kNaN;

    x = std::move(x_next);
    y[i] = std::move(y_next);
    v_prev = rec.v;
    d_prev = cfg.rule == Rule::a ? rec.d : 0.0;
    w_prev = rec.w;

    bool const finite = x.allFinite() && y[i].allFinite() && std::isfinite(tau) && std::isfinite(sigma);
    bool const epoch_end = (k + 1) % static_cast<long>(nb) == 0;
    if (finite && epoch_end) {
      Vector const recomputed = fresh_aggregate();
      double const drift = (recomputed - aty).norm() / std::max(recomputed.norm(), 1.0);
      res.max_aggregate_drift = std::max(res.max_aggregate_drift, drift);
      aty = recomputed;
      zbar = aty + extrap;
      if (opts.record_objective) { rec.objective = objective(problem, x); }
    }
    res.trace.records.push_back(rec);
    if (!finite) {
      res.status = RunStatus::diverged;
      res.message = "non-finite iterate at k=" + std::to_string(k) + " (block " + std::to_string(i) + ")";
      break;
    }
  }

  res.x = std::move(x);
  res.y = std::move(y);
  res.final_state = std::move(state);
  return res;
}

} // namespace aspdhg
