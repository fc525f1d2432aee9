#include "aspdhg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace aspdhg {

std::vector<double> SaddleProblem::probabilities() const
{
  std::vector<double> p;
  p.reserve(blocks.size());
  for (auto const &b : blocks) { p.push_back(b.prob); }
  return p;
}

std::vector<double> SaddleProblem::block_norms() const
{
  std::vector<double> n;
  n.reserve(blocks.size());
  for (auto const &b : blocks) { n.push_back(b.norm); }
  return n;
}

LinearMap SaddleProblem::full_operator() const
{
  if (blocks.empty()) { throw ConfigError("SaddleProblem: no dual blocks"); }
  LinearMap out = blocks.front().op;
  for (std::size_t i = 1; i < blocks.size(); ++i) { out = vstack(out, blocks[i].op); }
  return out;
}

void SaddleProblem::validate() const
{
  if (blocks.empty()) { throw ConfigError("SaddleProblem: no dual blocks"); }
  double sum = 0.0;
  for (auto const &b : blocks) {
    if (b.op.domain_dim() != primal_dim) { throw ConfigError("SaddleProblem: block domain mismatch"); }
    if (!(b.prob > 0.0)) { throw ConfigError("SaddleProblem: sampling is not proper (p_i <= 0)"); }
    if (!(b.norm >= 0.0)) { throw ConfigError("SaddleProblem: missing block norm"); }
    sum += b.prob;
  }
  if (std::abs(sum - 1.0) > 1e-12) { throw ConfigError("SaddleProblem: probabilities do not sum to 1"); }
}

void add_block(SaddleProblem &problem, LinearMap op, ProxFn f, double prob, std::optional<double> norm)
{
  double const n = norm ? *norm : kNormInflation * estimate_norm(op);
  ProxFn conj = f.conjugate();
  problem.blocks.push_back(DualBlock{std::move(op), std::move(f), std::move(conj), prob, n});
}

double objective(SaddleProblem const &problem, Vector const &x)
{
  if (x.size() != problem.primal_dim) { throw ConfigError("objective: dimension mismatch"); }
  double value = primal_value(x, problem.g);
  for (auto const &b : problem.blocks) { value += b.f.value(b.op.apply(x)); }
  return value;
}

std::vector<DiskSpec> const &phantom_disk_layout()
{
  static std::vector<DiskSpec> const layout{
    {0.0, 0.0, 0.40, 0.8},
    {0.18, -0.15, 0.08, 0.4},
    {0.0, 0.0, 0.10, 1.0},
  };
  return layout;
}

Phantom phantom_disks(Index side)
{
  if (side < 8) { throw ConfigError("phantom_disks: side must be >= 8"); }
  Phantom ph{side, Vector::Zero(side * side)};
  double const n = static_cast<double>(side);
  for (Index r = 0; r < side; ++r) {
    for (Index c = 0; c < side; ++c) {
      double const x = (static_cast<double>(c) + 0.5 - 0.5 * n) / n;
      double const y = (0.5 * n - static_cast<double>(r) - 0.5) / n;
      double v = 0.0;
      for (auto const &d : phantom_disk_layout()) {
        double const ex = x - d.cx;
        double const ey = y - d.cy;
        if (ex * ex + ey * ey <= d.radius * d.radius) { v = d.value; }
      }
      ph.pixels[r * side + c] = std::clamp(v, 0.0, 1.0);
    }
  }
  return ph;
}

Vector add_noise(Vector const &sino, NoiseSpec const &spec)
{
  std::mt19937_64 rng(spec.seed);
  switch (spec.kind) {
  case NoiseSpec::Kind::none: return sino;
  case NoiseSpec::Kind::gaussian: {
    if (spec.sigma_rel < 0.0) { throw ConfigError("add_noise: sigma_rel must be >= 0"); }
    double const sd = spec.sigma_rel * sino.cwiseAbs().mean();
    if (sd == 0.0) { return sino; }
    std::normal_distribution<double> gauss(0.0, sd);
    Vector out = sino;
    for (auto &e : out) { e += gauss(rng); }
    return out;
  }
  case NoiseSpec::Kind::scaled_poisson: {
    if (!(spec.dose > 0.0)) { throw ConfigError("add_noise: dose must be > 0"); }
    if ((sino.array() < 0.0).any()) { throw ConfigError("add_noise: negative sinogram with Poisson noise"); }
    double const peak = sino.maxCoeff();
    if (peak == 0.0) { return sino; }
    Vector out(sino.size());
    for (Index k = 0; k < sino.size(); ++k) {
      double const mean = spec.dose * sino[k] / peak;
      if (mean == 0.0) {
        out[k] = 0.0;
        continue;
      }
      std::poisson_distribution<long long> pois(mean);
      out[k] = static_cast<double>(pois(rng)) * peak / spec.dose;
    }
    return out;
  }
  }
  return sino;
}

TvCtInstance build_tv_ct(TvCtOptions const &opts)
{
  if (opts.n_batches < 1) { throw ConfigError("build_tv_ct: n_batches must be >= 1"); }
  if (opts.with_tv && !(opts.lambda > 0.0)) { throw ConfigError("build_tv_ct: lambda must be > 0"); }

  auto const &geom = opts.geometry;
  if (opts.n_batches > geom.n_angles) { throw ConfigError("build_tv_ct: more batches than views"); }
  LinearMap proj = toy_projector(geom);
  Phantom truth = phantom_disks(geom.grid);
  Vector clean = proj.apply(truth.pixels);
  Vector sino = add_noise(clean, opts.noise);

  Index const n_blocks = opts.n_batches + (opts.with_tv ? 1 : 0);
  double p_tv = 0.0;
  double p_data = 1.0 / static_cast<double>(n_blocks);
  if (opts.with_tv && opts.tv_prob > 0.0) {
    if (opts.tv_prob >= 1.0) { throw ConfigError("build_tv_ct: tv_prob must be < 1"); }
    p_tv = opts.tv_prob;
    p_data = (1.0 - p_tv) / static_cast<double>(opts.n_batches);
  } else if (opts.with_tv) {
    p_tv = p_data;
  }

  SaddleProblem problem;
  problem.primal_dim = geom.grid * geom.grid;
  problem.g = opts.g;
  auto part = partition_interleaved(proj, sino, opts.n_batches, geom.n_detectors);
  for (Index i = 0; i < opts.n_batches; ++i) {
    add_block(problem, std::move(part.blocks[i]), ProxFn::sq_l2_datafit(std::move(part.data_blocks[i])),
              p_data);
  }
  if (opts.with_tv) {
    LinearMap grad = gradient_2d(geom.grid);
    double const est = estimate_norm(grad);
    double norm = std::min(kNormInflation * est, kGradientNormBound);
    double scale = 1.0;
    if (opts.normalize_tv) {
      double data_max = 0.0;
      for (auto const &b : problem.blocks) { data_max = std::max(data_max, b.norm); }
      scale = data_max / norm;
      SparseRows scaled = scale * grad.matrix();
      grad = LinearMap::from_matrix(std::move(scaled));
      grad.set_norm_cache(scale * est);
      norm = data_max;
    }
    add_block(problem, std::move(grad), ProxFn::l1_scaled(opts.lambda / scale), p_tv, norm);
  }
  // Rebalance rounding so the probabilities sum to one.
  double sum = 0.0;
  for (auto const &b : problem.blocks) { sum += b.prob; }
  problem.blocks.back().prob += 1.0 - sum;
  problem.validate();

  return TvCtInstance{std::move(problem), std::move(truth), std::move(proj), std::move(clean), std::move(sino),
                      opts.with_tv ? opts.lambda : 0.0};
}

Vector backprojection_warm_start(TvCtInstance const &inst)
{
  Vector bp = inst.projector.adjoint(inst.sinogram);
  double const lo = bp.minCoeff();
  double const hi = bp.maxCoeff();
  if (hi - lo <= 0.0) { return Vector::Zero(bp.size()); }
  return (bp.array() - lo) / (hi - lo);
}

} // namespace aspdhg
