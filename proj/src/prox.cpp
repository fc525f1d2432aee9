#include "aspdhg/prox.hpp"

#include <cmath>
#include <limits>

namespace aspdhg {

namespace {

void check_positive(double v, char const *what)
{
  if (!(v > 0.0)) { throw ConfigError(std::string(what) + " must be positive"); }
}

void check_same(Vector const &a, Vector const &b, char const *what)
{
  if (a.size() != b.size()) { throw ConfigError(std::string(what) + ": dimension mismatch"); }
}

} // namespace

Vector prox_l1(Vector const &y, double t, double lambda)
{
  check_positive(t, "prox_l1: t");
  check_positive(lambda, "prox_l1: lambda");
  double const thr = t * lambda;
  return y.unaryExpr([thr](double v) { return std::copysign(std::max(std::abs(v) - thr, 0.0), v); });
}

Vector prox_conj_sq_l2(Vector const &y, double sigma, Vector const &b)
{
  check_positive(sigma, "prox_conj_sq_l2: sigma");
  check_same(y, b, "prox_conj_sq_l2");
  return (y - sigma * b) / (1.0 + sigma);
}

Vector prox_conj_l1(Vector const &y, double sigma, double lambda)
{
  check_positive(sigma, "prox_conj_l1: sigma");
  check_positive(lambda, "prox_conj_l1: lambda");
  return y.cwiseMax(-lambda).cwiseMin(lambda);
}

Vector prox_sq_l2(Vector const &y, double t, Vector const &b)
{
  check_positive(t, "prox_sq_l2: t");
  check_same(y, b, "prox_sq_l2");
  return (y + t * b) / (1.0 + t);
}

Vector prox_primal(Vector const &y, double t, PrimalKind kind)
{
  check_positive(t, "prox_primal: t");
  if (kind == PrimalKind::nonneg_indicator) { return y.cwiseMax(0.0); }
  return y;
}

double primal_value(Vector const &x, PrimalKind kind)
{
  if (kind == PrimalKind::nonneg_indicator && (x.array() < 0.0).any()) {
    return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

ProxFn ProxFn::l1_scaled(double lambda)
{
  check_positive(lambda, "l1_scaled: lambda");
  ProxFn f(Kind::l1_scaled);
  f.lambda_ = lambda;
  return f;
}

ProxFn ProxFn::sq_l2_datafit(Vector b)
{
  ProxFn f(Kind::sq_l2_datafit);
  f.b_ = std::move(b);
  return f;
}

ProxFn ProxFn::conj_sq_l2_datafit(Vector b)
{
  ProxFn f(Kind::conj_sq_l2_datafit);
  f.b_ = std::move(b);
  return f;
}

ProxFn ProxFn::linf_ball_proj(double lambda)
{
  check_positive(lambda, "linf_ball_proj: lambda");
  ProxFn f(Kind::linf_ball_proj);
  f.lambda_ = lambda;
  return f;
}

Vector ProxFn::prox(Vector const &y, double t) const
{
  switch (kind_) {
  case Kind::zero: return prox_primal(y, t, PrimalKind::zero);
  case Kind::nonneg_indicator: return prox_primal(y, t, PrimalKind::nonneg_indicator);
  case Kind::l1_scaled: return prox_l1(y, t, lambda_);
  case Kind::sq_l2_datafit: return prox_sq_l2(y, t, b_);
  case Kind::conj_sq_l2_datafit: return prox_conj_sq_l2(y, t, b_);
  case Kind::linf_ball_proj: return prox_conj_l1(y, t, lambda_);
  }
  return y;
}

double ProxFn::value(Vector const &z) const
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
  case Kind::zero: return 0.0;
  case Kind::nonneg_indicator: return primal_value(z, PrimalKind::nonneg_indicator);
  case Kind::l1_scaled: return lambda_ * z.lpNorm<1>();
  case Kind::sq_l2_datafit: check_same(z, b_, "sq_l2_datafit"); return 0.5 * (z - b_).squaredNorm();
  case Kind::conj_sq_l2_datafit:
    // (1/2|.-b|^2)^*(y) = 1/2|y|^2 + <y, b>
    check_same(z, b_, "conj_sq_l2_datafit");
    return 0.5 * z.squaredNorm() + z.dot(b_);
  case Kind::linf_ball_proj: return z.lpNorm<Eigen::Infinity>() <= lambda_ ? 0.0 : inf;
  }
  return 0.0;
}

ProxFn ProxFn::conjugate() const
{
  switch (kind_) {
  case Kind::l1_scaled: return linf_ball_proj(lambda_);
  case Kind::linf_ball_proj: return l1_scaled(lambda_);
  case Kind::sq_l2_datafit: return conj_sq_l2_datafit(b_);
  case Kind::conj_sq_l2_datafit: return sq_l2_datafit(b_);
  case Kind::zero:
  case Kind::nonneg_indicator: break;
  }
  throw ConfigError("ProxFn::conjugate: no closed form for this kind");
}

} // namespace aspdhg
