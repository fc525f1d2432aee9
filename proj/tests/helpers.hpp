#pragma once

#include "aspdhg/linop.hpp"

#include <random>

namespace testutil {

inline aspdhg::Vector random_vector(std::mt19937_64 &rng, aspdhg::Index n, double scale = 1.0)
{
  std::normal_distribution<double> g(0.0, scale);
  aspdhg::Vector v(n);
  for (auto &e : v) { e = g(rng); }
  return v;
}

inline aspdhg::Matrix random_matrix(std::mt19937_64 &rng, aspdhg::Index r, aspdhg::Index c)
{
  std::normal_distribution<double> g(0.0, 1.0);
  aspdhg::Matrix m(r, c);
  for (aspdhg::Index j = 0; j < c; ++j) {
    for (aspdhg::Index i = 0; i < r; ++i) { m(i, j) = g(rng); }
  }
  return m;
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Dense copy of an operator built column by column from apply().
inline aspdhg::Matrix materialize(aspdhg::LinearMap const &op)
{
  aspdhg::Matrix m(op.range_dim(), op.domain_dim());
  for (aspdhg::Index j = 0; j < op.domain_dim(); ++j) {
    m.col(j) = op.apply(aspdhg::Vector::Unit(op.domain_dim(), j));
  }
  return m;
}

} // namespace testutil
