#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aspdhg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Raised for inconsistent dimensions or parameters. These are programming or
/// configuration mistakes and are never recovered from inside the library.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Matrix-free linear operator between finite-dimensional Euclidean spaces.
 *
 * A map is defined by a forward and an adjoint callback. Maps built from an
 * explicit matrix also keep that matrix around so that rows can be sliced
 * (block partitioning, row-subsampled residuals). Instances are immutable
 * apart from the spectral norm cache, which is written once.
 */
class LinearMap
{
public:
  using Fn = std::function<void(Vector const &, Vector &)>;

  LinearMap(Index domain_dim, Index range_dim, Fn forward, Fn adjoint);

  /// Operator backed by an explicit row-major sparse matrix.
  static LinearMap from_matrix(SparseRows matrix);
  static LinearMap from_dense(Matrix const &matrix);

  Index domain_dim() const { return domain_; }
  Index range_dim() const { return range_; }

  Vector apply(Vector const &x) const;
  Vector adjoint(Vector const &y) const;

  /// Row access is available only for matrix-backed operators.
  bool has_rows() const { return matrix_ != nullptr; }
  SparseRows const &matrix() const;
  double apply_row(Index row, Vector const &x) const;

  std::optional<double> norm_cache() const { return *norm_; }
  void set_norm_cache(double value) const { *norm_ = value; }

private:
  Index domain_;
  Index range_;
  Fn forward_;
  Fn adjoint_;
  std::shared_ptr<SparseRows const> matrix_;
  std::shared_ptr<std::optional<double>> norm_ = std::make_shared<std::optional<double>>();
};

LinearMap identity_map(Index dim);

/// 1-D forward differences with a zero last entry (replicate boundary).
LinearMap forward_difference_1d(Index n);

/// 2-D forward differences on a side x side image, replicate boundary.
/// Output stacks horizontal differences over vertical ones (2 * side^2 rows).
LinearMap gradient_2d(Index side);

/// Analytic bound on the spectral norm of gradient_2d.
inline constexpr double kGradientNormBound = 2.8284271247461903; // sqrt(8)

struct PowerIterationOptions
{
  double tol = 1e-6;
  int max_iters = 1000;
  std::uint64_t seed = 0;
};

/// Largest singular value by power iteration on A^T A. Stores the result in
/// the operator's norm cache. A zero operator yields 0.
double estimate_norm(LinearMap const &op, PowerIterationOptions const &opts = {});

/// Returns the cached norm, estimating it with default options if absent.
double operator_norm(LinearMap const &op);

struct BlockPartition
{
  std::vector<LinearMap> blocks;
  std::vector<Vector> data_blocks;
  std::vector<std::vector<Index>> row_index_sets;
};

/**
 * Interleaved row partition into n blocks.
 *
 * Consecutive rows are grouped into units of `group_size` rows (for a
 * sinogram, group_size = detectors per view makes each unit one projection);
 * unit u goes to block u mod n. With group_size = 1, row r goes to block r mod n.
 */
BlockPartition partition_interleaved(LinearMap const &op, Vector const &b, Index n,
                                     Index group_size = 1);

struct ProjectorGeometry
{
  Index grid = 64;
  Index n_angles = 60;
  Index n_detectors = 95;
  double detector_spacing = 1.0; // pixel units
  double angle_start_deg = 0.0;
  double angle_range_deg = 180.0;
  /// Physical side of one pixel; chord lengths are multiplied by it.
  double pixel_size = 1.0;
};

/// Parallel-beam projection angle of view `a`, in radians.
double projector_angle(ProjectorGeometry const &geom, Index a);
/// Signed detector offset of bin `j` from the rotation centre, in pixel units.
double detector_offset(ProjectorGeometry const &geom, Index j);

/**
 * Parallel-beam line-integral projector with Siddon traversal.
 *
 * The image occupies [-grid/2, grid/2]^2 with unit pixels; pixel (r, c) is
 * stored at r * grid + c with row 0 at the top. Ray (a, j) follows
 * t * (cos th, sin th) + s * (-sin th, cos th), row index a * n_detectors + j.
 */
LinearMap toy_projector(ProjectorGeometry const &geom);
LinearMap toy_projector(Index grid, Index n_angles, Index n_detectors);

/// Vertical stack [first; second] of two operators with equal domains.
LinearMap vstack(LinearMap const &first, LinearMap const &second);

} // namespace aspdhg
