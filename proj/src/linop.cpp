#include "aspdhg/linop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace aspdhg {

namespace {

void check_dim(Index got, Index want, char const *what)
{
  if (got != want) {
    throw ConfigError(std::string(what) + ": dimension mismatch (got " + std::to_string(got) +
                      ", expected " + std::to_string(want) + ")");
  }
}

} // namespace

LinearMap::LinearMap(Index domain_dim, Index range_dim, Fn forward, Fn adjoint)
  : domain_(domain_dim)
  , range_(range_dim)
  , forward_(std::move(forward))
  , adjoint_(std::move(adjoint))
{
  if (domain_ <= 0 || range_ <= 0) { throw ConfigError("LinearMap: dimensions must be positive"); }
}

LinearMap LinearMap::from_matrix(SparseRows matrix)
{
  matrix.makeCompressed();
  auto m = std::make_shared<SparseRows const>(std::move(matrix));
  LinearMap op(
    m->cols(), m->rows(), [m](Vector const &x, Vector &y) { y.noalias() = *m * x; },
    [m](Vector const &y, Vector &x) { x.noalias() = m->transpose() * y; });
  op.matrix_ = std::move(m);
  return op;
}

LinearMap LinearMap::from_dense(Matrix const &matrix)
{
  return from_matrix(matrix.sparseView(0.0, 0.0));
}

Vector LinearMap::apply(Vector const &x) const
{
  check_dim(x.size(), domain_, "LinearMap::apply");
  Vector y(range_);
  forward_(x, y);
  return y;
}

Vector LinearMap::adjoint(Vector const &y) const
{
  check_dim(y.size(), range_, "LinearMap::adjoint");
  Vector x(domain_);
  adjoint_(y, x);
  return x;
}

SparseRows const &LinearMap::matrix() const
{
  if (!matrix_) { throw ConfigError("LinearMap: operator has no explicit rows"); }
  return *matrix_;
}

double LinearMap::apply_row(Index row, Vector const &x) const
{
  auto const &m = matrix();
  check_dim(x.size(), domain_, "LinearMap::apply_row");
  double acc = 0.0;
  for (SparseRows::InnerIterator it(m, row); it; ++it) {
    acc += it.value() * x[it.col()];
  }
  return acc;
}

LinearMap identity_map(Index dim)
{
  SparseRows id(dim, dim);
  id.setIdentity();
  auto op = LinearMap::from_matrix(std::move(id));
  op.set_norm_cache(1.0);
  return op;
}

LinearMap forward_difference_1d(Index n)
{
  if (n < 1) { throw ConfigError("forward_difference_1d: n must be positive"); }
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i + 1 < n; ++i) {
    t.emplace_back(i, i, -1.0);
    t.emplace_back(i, i + 1, 1.0);
  }
  SparseRows d(n, n);
  d.setFromTriplets(t.begin(), t.end());
  return LinearMap::from_matrix(std::move(d));
}

LinearMap gradient_2d(Index side)
{
  if (side < 1) { throw ConfigError("gradient_2d: side must be positive"); }
  Index const npix = side * side;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * npix);
  for (Index r = 0; r < side; ++r) {
    for (Index c = 0; c < side; ++c) {
      Index const p = r * side + c;
      if (c + 1 < side) {
        t.emplace_back(p, p, -1.0);
        t.emplace_back(p, p + 1, 1.0);
      }
      if (r + 1 < side) {
        t.emplace_back(npix + p, p, -1.0);
        t.emplace_back(npix + p, p + side, 1.0);
      }
    }
  }
  SparseRows d(2 * npix, npix);
  d.setFromTriplets(t.begin(), t.end());
  return LinearMap::from_matrix(std::move(d));
}

double estimate_norm(LinearMap const &op, PowerIterationOptions const &opts)
{
  if (!(opts.tol > 0.0) || opts.max_iters < 1) {
    throw ConfigError("estimate_norm: tol must be > 0 and max_iters >= 1");
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Vector v(op.domain_dim());
  for (auto &e : v) { e = gauss(rng); }
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Vector const av = op.apply(v);
    double const next = av.squaredNorm(); // Rayleigh quotient of A^T A at unit v
    Vector w = op.adjoint(av);
    double const wn = w.norm();
    if (wn == 0.0) {
      lambda = next;
      break;
    }
    v = w / wn;
    bool const done = std::abs(next - lambda) <= opts.tol * next;
    lambda = next;
    if (done) { break; }
  }
  // One final Rayleigh quotient at the latest direction.
  lambda = std::max(lambda, op.apply(v).squaredNorm());
  double const norm = std::sqrt(lambda);
  op.set_norm_cache(norm);
  return norm;
}

double operator_norm(LinearMap const &op)
{
  if (auto n = op.norm_cache()) { return *n; }
  return estimate_norm(op);
}

BlockPartition partition_interleaved(LinearMap const &op, Vector const &b, Index n,
                                     Index group_size)
{
  auto const &m = op.matrix();
  Index const rows = m.rows();
  check_dim(b.size(), rows, "partition_interleaved: data");
  if (n < 1) { throw ConfigError("partition_interleaved: n must be >= 1"); }
  if (group_size < 1 || rows % group_size != 0) {
    throw ConfigError("partition_interleaved: group size must divide the row count");
  }
  if (n > rows / group_size) { throw ConfigError("partition_interleaved: more blocks than rows"); }

  BlockPartition part;
  part.row_index_sets.resize(n);
  for (Index r = 0; r < rows; ++r) {
    part.row_index_sets[(r / group_size) % n].push_back(r);
  }
  for (auto const &rowset : part.row_index_sets) {
    auto const nr = static_cast<Index>(rowset.size());
    std::vector<Eigen::Triplet<double>> t;
    Vector bi(nr);
    for (Index k = 0; k < nr; ++k) {
      for (SparseRows::InnerIterator it(m, rowset[k]); it; ++it) {
        t.emplace_back(k, it.col(), it.value());
      }
      bi[k] = b[rowset[k]];
    }
    SparseRows block(nr, m.cols());
    block.setFromTriplets(t.begin(), t.end());
    part.blocks.push_back(LinearMap::from_matrix(std::move(block)));
    part.data_blocks.push_back(std::move(bi));
  }
  return part;
}

double projector_angle(ProjectorGeometry const &geom, Index a)
{
  double const deg = geom.angle_start_deg +
                     geom.angle_range_deg * static_cast<double>(a) / static_cast<double>(geom.n_angles);
  return deg * std::numbers::pi / 180.0;
}

double detector_offset(ProjectorGeometry const &geom, Index j)
{
  return (static_cast<double>(j) - 0.5 * static_cast<double>(geom.n_detectors - 1)) *
         geom.detector_spacing;
}

LinearMap toy_projector(ProjectorGeometry const &geom)
{
  if (geom.grid < 2 || geom.n_angles < 1 || geom.n_detectors < 1) {
    throw ConfigError("toy_projector: need grid >= 2, n_angles >= 1, n_detectors >= 1");
  }
  if (!(geom.detector_spacing > 0.0) || !(geom.angle_range_deg > 0.0) || !(geom.pixel_size > 0.0)) {
    throw ConfigError("toy_projector: detector spacing, angle range and pixel size must be positive");
  }
  Index const n = geom.grid;
  double const h = 0.5 * static_cast<double>(n);
  constexpr double kParallel = 1e-12;
  constexpr double kMinSegment = 1e-12;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(geom.n_angles * geom.n_detectors * 2 * n));
  std::vector<double> cuts;
  cuts.reserve(2 * (n + 1) + 2);

  for (Index a = 0; a < geom.n_angles; ++a) {
    double const th = projector_angle(geom, a);
    double const ct = std::cos(th);
    double const st = std::sin(th);
    double const dx = -st;
    double const dy = ct;
    for (Index j = 0; j < geom.n_detectors; ++j) {
      double const t = detector_offset(geom, j);
      double const ox = t * ct;
      double const oy = t * st;
      Index const row = a * geom.n_detectors + j;

      // Entry/exit of the ray through the image box.
      double smin = -std::numeric_limits<double>::infinity();
      double smax = std::numeric_limits<double>::infinity();
      auto slab = [&](double o, double d) {
        if (std::abs(d) < kParallel) {
          if (o < -h || o > h) { smin = 1.0, smax = 0.0; }
          return;
        }
        double s0 = (-h - o) / d;
        double s1 = (h - o) / d;
        if (s0 > s1) { std::swap(s0, s1); }
        smin = std::max(smin, s0);
        smax = std::min(smax, s1);
      };
      slab(ox, dx);
      slab(oy, dy);
      if (!(smax - smin > kMinSegment)) { continue; }

      cuts.clear();
      cuts.push_back(smin);
      cuts.push_back(smax);
      auto planes = [&](double o, double d) {
        if (std::abs(d) < kParallel) { return; }
        for (Index k = 0; k <= n; ++k) {
          double const s = (static_cast<double>(k) - h - o) / d;
          if (s > smin && s < smax) { cuts.push_back(s); }
        }
      };
      planes(ox, dx);
      planes(oy, dy);
      std::sort(cuts.begin(), cuts.end());

      for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
        double const len = cuts[q + 1] - cuts[q];
        if (len <= kMinSegment) { continue; }
        double const sm = 0.5 * (cuts[q] + cuts[q + 1]);
        double const mx = ox + sm * dx;
        double const my = oy + sm * dy;
        auto const c = std::clamp<Index>(static_cast<Index>(std::floor(mx + h)), 0, n - 1);
        auto const r = std::clamp<Index>(static_cast<Index>(std::floor(h - my)), 0, n - 1);
        trip.emplace_back(row, r * n + c, len * geom.pixel_size);
      }
    }
  }
  SparseRows m(geom.n_angles * geom.n_detectors, n * n);
  m.setFromTriplets(trip.begin(), trip.end());
  return LinearMap::from_matrix(std::move(m));
}

LinearMap toy_projector(Index grid, Index n_angles, Index n_detectors)
{
  ProjectorGeometry geom;
  geom.grid = grid;
  geom.n_angles = n_angles;
  geom.n_detectors = n_detectors;
  return toy_projector(geom);
}

LinearMap vstack(LinearMap const &first, LinearMap const &second)
{
  check_dim(second.domain_dim(), first.domain_dim(), "vstack");
  if (first.has_rows() && second.has_rows()) {
    auto const &a = first.matrix();
    auto const &b = second.matrix();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() + b.nonZeros()));
    for (Index r = 0; r < a.rows(); ++r) {
      for (SparseRows::InnerIterator it(a, r); it; ++it) { t.emplace_back(r, it.col(), it.value()); }
    }
    for (Index r = 0; r < b.rows(); ++r) {
      for (SparseRows::InnerIterator it(b, r); it; ++it) {
        t.emplace_back(a.rows() + r, it.col(), it.value());
      }
    }
    SparseRows m(a.rows() + b.rows(), a.cols());
    m.setFromTriplets(t.begin(), t.end());
    return LinearMap::from_matrix(std::move(m));
  }
  Index const ra = first.range_dim();
  Index const rb = second.range_dim();
  return LinearMap(
    first.domain_dim(), ra + rb,
    [first, second, ra, rb](Vector const &x, Vector &y) {
      y.head(ra) = first.apply(x);
      y.tail(rb) = second.apply(x);
    },
    [first, second, ra, rb](Vector const &y, Vector &x) {
      x = first.adjoint(y.head(ra)) + second.adjoint(y.tail(rb));
    });
}

} // namespace aspdhg
