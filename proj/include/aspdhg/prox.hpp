#pragma once

#include "aspdhg/linop.hpp"

namespace aspdhg {

// Closed-form proximal maps, prox_{t f}(y) = argmin_z 1/2 |z - y|^2 + t f(z).

/// Soft threshold at t * lambda.
Vector prox_l1(Vector const &y, double t, double lambda);

/// prox of sigma * f* for f(z) = 1/2 |z - b|^2.
Vector prox_conj_sq_l2(Vector const &y, double sigma, Vector const &b);

/// prox of sigma * f* for f(z) = lambda |z|_1: projection onto the l-inf ball of radius lambda.
Vector prox_conj_l1(Vector const &y, double sigma, double lambda);

/// prox of t * f for f(z) = 1/2 |z - b|^2.
Vector prox_sq_l2(Vector const &y, double t, Vector const &b);

enum class PrimalKind { zero, nonneg_indicator };

Vector prox_primal(Vector const &y, double t, PrimalKind kind);

/// Value of g; +inf outside the nonnegative orthant for the indicator.
double primal_value(Vector const &x, PrimalKind kind);

/**
 * A function from the experiment family together with its closed-form prox.
 *
 * Conjugate kinds describe f* of the corresponding primal kinds; `conjugate()`
 * switches between the two.
 */
class ProxFn
{
public:
  enum class Kind { zero, nonneg_indicator, l1_scaled, sq_l2_datafit, conj_sq_l2_datafit, linf_ball_proj };

  static ProxFn zero() { return ProxFn(Kind::zero); }
  static ProxFn nonneg_indicator() { return ProxFn(Kind::nonneg_indicator); }
  static ProxFn l1_scaled(double lambda);
  static ProxFn sq_l2_datafit(Vector b);
  static ProxFn conj_sq_l2_datafit(Vector b);
  static ProxFn linf_ball_proj(double lambda);

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  Vector const &data() const { return b_; }

  /// prox_{t f}(y); t > 0.
  Vector prox(Vector const &y, double t) const;
  /// f(z), possibly +inf for indicator kinds.
  double value(Vector const &z) const;
  ProxFn conjugate() const;

private:
  explicit ProxFn(Kind kind) : kind_(kind) {}
  Kind kind_;
  double lambda_ = 0.0;
  Vector b_;
};

} // namespace aspdhg
