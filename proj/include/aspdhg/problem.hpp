#pragma once

#include "aspdhg/linop.hpp"
#include "aspdhg/prox.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace aspdhg {

/// Safety factor applied to power-iteration norm estimates before they enter
/// step-size bounds.
inline constexpr double kNormInflation = 1.001;

/// One dual block: A_i, f_i, sampling probability p_i and the bound used for |A_i|.
struct DualBlock
{
  LinearMap op;
  ProxFn f;    // f_i
  ProxFn conj; // f_i^*, drives the dual prox
  double prob = 0.0;
  double norm = 0.0;
};

/// min_x sum_i f_i(A_i x) + g(x), sampled one dual block at a time.
struct SaddleProblem
{
  Index primal_dim = 0;
  std::vector<DualBlock> blocks;
  PrimalKind g = PrimalKind::zero;

  std::vector<double> probabilities() const;
  std::vector<double> block_norms() const;
  /// Stacked operator [A_1; ...; A_n].
  LinearMap full_operator() const;
  /// Throws ConfigError unless probabilities are proper and dimensions agree.
  void validate() const;
};

/// Appends a block, estimating |A_i| (inflated) when `norm` is not given.
void add_block(SaddleProblem &problem, LinearMap op, ProxFn f, double prob,
               std::optional<double> norm = std::nullopt);

double objective(SaddleProblem const &problem, Vector const &x);

struct Phantom
{
  Index side = 0;
  Vector pixels;
};

/// Background 0, a large disk at 0.8 holding an off-centre disk at 0.4 and a
/// centred disk at 1.0.
Phantom phantom_disks(Index side);

struct DiskSpec
{
  double cx, cy, radius, value; // in units of the side length, centre at origin
};
/// Disks painted in order by phantom_disks; later disks overwrite earlier ones.
std::vector<DiskSpec> const &phantom_disk_layout();

struct NoiseSpec
{
  enum class Kind { none, gaussian, scaled_poisson };
  Kind kind = Kind::none;
  double sigma_rel = 0.0;
  double dose = 0.0;
  std::uint64_t seed = 0;
};

Vector add_noise(Vector const &sino, NoiseSpec const &spec);

struct TvCtOptions
{
  ProjectorGeometry geometry;
  double lambda = 1.0;
  bool with_tv = true;
  Index n_batches = 5;
  /// Probability of the TV block; <= 0 means uniform over all blocks.
  double tv_prob = 0.0;
  PrimalKind g = PrimalKind::zero;
  /// Scale D by c = max_i |A_i| / |D| and use lambda / c, so the TV block's
  /// norm matches the data blocks. The objective is unchanged.
  bool normalize_tv = true;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

struct TvCtInstance
{
  SaddleProblem problem;
  Phantom truth;
  LinearMap projector;
  Vector clean;    // R * truth
  Vector sinogram; // noisy data b
  double lambda = 0.0;
};

/**
 * Sparse-view/low-dose/limited-angle style CT instance.
 *
 * The projector is split by interleaving whole views into n_batches data
 * blocks with f_i = 1/2 |. - b_i|^2, followed by one TV block lambda |D .|_1
 * unless disabled.
 */
TvCtInstance build_tv_ct(TvCtOptions const &opts);

/// A^T b rescaled to [0, 1]; a crude unfiltered backprojection start.
Vector backprojection_warm_start(TvCtInstance const &inst);

} // namespace aspdhg
