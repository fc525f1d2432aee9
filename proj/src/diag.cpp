#include "aspdhg/diag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace aspdhg {

Matrix MetricBlock::assemble() const
{
  Index const nx = P.cols();
  Index const ny = P.rows();
  Matrix m = Matrix::Zero(nx + ny, nx + ny);
  m.topLeftCorner(nx, nx).diagonal().setConstant(a);
  m.bottomRightCorner(ny, ny).diagonal().setConstant(b);
  m.topRightCorner(nx, ny) = P.transpose();
  m.bottomLeftCorner(ny, nx) = P;
  return m;
}

Vector jacobi_eigenvalues(Matrix a)
{
  Index const n = a.rows();
  if (a.cols() != n) { throw ConfigError("jacobi_eigenvalues: matrix must be square"); }
  double const scale = std::max(a.norm(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) { off += a(p, q) * a(p, q); }
    }
    if (std::sqrt(off) <= 1e-15 * scale) { break; }
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double const apq = a(p, q);
        if (apq == 0.0) { continue; }
        // Rotation zeroing a(p, q).
        double const theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double const t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double const c = 1.0 / std::sqrt(t * t + 1.0);
        double const s = t * c;
        for (Index k = 0; k < n; ++k) {
          double const akp = a(k, p);
          double const akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          double const apk = a(p, k);
          double const aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev = a.diagonal();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double metric_min_eig(MetricBlock const &block)
{
  if (block.P.rows() + block.P.cols() > kMetricDimCap) {
    throw ConfigError("metric_min_eig: block too large to materialize");
  }
  return jacobi_eigenvalues(block.assemble())[0];
}

double metric_min_eig_shifted(MetricBlock const &block, double beta)
{
  MetricBlock shifted = block;
  shifted.a *= beta;
  shifted.b *= beta;
  return metric_min_eig(shifted);
}

MetricBlock sampled_metric(double tau, double sigma, double prob, Matrix const &block_op)
{
  return MetricBlock{1.0 / tau, 1.0 / (prob * sigma), -block_op / prob};
}

namespace {

ReferenceSolution plain_pdhg(SaddleProblem const &problem, double knorm, long iters, double ratio, double product,
                             long every)
{
  double const tau = std::sqrt(product * ratio) / knorm;
  double const sigma = tau / ratio;

  std::size_t const nb = problem.blocks.size();
  Vector x = Vector::Zero(problem.primal_dim);
  std::vector<Vector> y;
  for (auto const &b : problem.blocks) { y.push_back(Vector::Zero(b.op.range_dim())); }
  Vector kt_ybar = Vector::Zero(problem.primal_dim);

  ReferenceSolution out;
  out.ratio = ratio;
  out.f_star = objective(problem, x);
  for (long it = 0; it < iters; ++it) {
    x = prox_primal(x - tau * kt_ybar, tau, problem.g);
    bool const record = (it + 1) % every == 0 || it + 1 == iters;
    double f = primal_value(x, problem.g);
    kt_ybar.setZero();
    for (std::size_t i = 0; i < nb; ++i) {
      auto const &blk = problem.blocks[i];
      Vector const ax = blk.op.apply(x);
      if (record) { f += blk.f.value(ax); }
      Vector y_next = blk.conj.prox(y[i] + sigma * ax, sigma);
      kt_ybar += blk.op.adjoint(2.0 * y_next - y[i]);
      y[i] = std::move(y_next);
    }
    if (!x.allFinite()) { throw std::runtime_error("reference_solution: non-finite iterate"); }
    if (record) { out.f_star = std::min(out.f_star, f); }
  }
  out.x = std::move(x);
  return out;
}

} // namespace

ReferenceSolution reference_solution(SaddleProblem const &problem, ReferenceOptions const &opts)
{
  problem.validate();
  if (opts.iters < 1 || opts.objective_every < 1 || !(opts.product > 0.0 && opts.product < 1.0)) {
    throw ConfigError("reference_solution: invalid options");
  }
  double const knorm = kNormInflation * estimate_norm(problem.full_operator());
  double ratio = opts.ratio;
  if (!(ratio > 0.0)) {
    if (opts.pilot_iters < 1) { throw ConfigError("reference_solution: pilot_iters must be >= 1"); }
    double best = std::numeric_limits<double>::infinity();
    for (int e = 1; e <= 9; ++e) {
      double const r = std::pow(10.0, -e);
      double const f = plain_pdhg(problem, knorm, opts.pilot_iters, r, opts.product, opts.objective_every).f_star;
      if (f < best) {
        best = f;
        ratio = r;
      }
    }
  }
  return plain_pdhg(problem, knorm, opts.iters, ratio, opts.product, opts.objective_every);
}

std::vector<std::pair<long, double>> relative_suboptimality(IterationTrace const &trace, double f_star)
{
  if (!std::isfinite(f_star)) { throw ConfigError("relative_suboptimality: F* must be finite"); }
  std::vector<std::pair<long, double>> out;
  double const denom = std::max(f_star, kSuboptGuard);
  for (auto const &[epoch, f] : trace.epoch_objectives()) { out.emplace_back(epoch, (f - f_star) / denom); }
  return out;
}

long epochs_to_threshold(std::vector<std::pair<long, double>> const &subopt, double threshold)
{
  for (auto const &[epoch, s] : subopt) {
    if (s <= threshold) { return epoch + 1; }
  }
  return -1;
}

double ratio_stabilization(IterationTrace const &trace, std::size_t window)
{
  auto const &r = trace.records;
  if (window == 0 || r.size() < window) { throw ConfigError("ratio_stabilization: trace shorter than window"); }
  double worst = 0.0;
  for (std::size_t j = std::max<std::size_t>(r.size() - window, 1); j < r.size(); ++j) {
    worst = std::max(worst, std::abs(std::log10(r[j].ratio / r[j - 1].ratio)));
  }
  return worst;
}

namespace {

double median(std::vector<double> v)
{
  if (v.empty()) { return std::numeric_limits<double>::quiet_NaN(); }
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (v.size() % 2 == 1) { return hi; }
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

std::string num(double v)
{
  if (std::isnan(v)) { return {}; }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

} // namespace

double iterate_difference_decay(IterationTrace const &trace, double fraction)
{
  auto const &r = trace.records;
  auto const n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(r.size())));
  if (n == 0 || r.size() < 2) { throw ConfigError("iterate_difference_decay: trace too short"); }
  std::vector<double> head;
  std::vector<double> tail;
  for (std::size_t j = 0; j < n; ++j) {
    head.push_back(r[j].dx_norm);
    tail.push_back(r[r.size() - n + j].dx_norm);
  }
  return median(tail) / median(head);
}

void write_summary_header(std::ostream &os)
{
  os << "run,rule,mode,ratio0,seed,epochs,status,final_objective,final_subopt,epochs_to_threshold,final_ratio,"
        "stabilization\n";
}

void write_summary_row(std::ostream &os, SummaryRow const &row)
{
  os << row.run << ',' << row.rule << ',' << row.mode << ',' << num(row.ratio0) << ',' << row.seed << ','
     << row.epochs << ',' << row.status << ',' << num(row.final_objective) << ',' << num(row.final_subopt) << ','
     << row.epochs_to_threshold << ',' << num(row.final_ratio) << ',' << num(row.stabilization) << '\n';
}

} // namespace aspdhg
