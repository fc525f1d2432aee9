#include "aspdhg/prox.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace aspdhg;
using testutil::random_vector;
using testutil::uniform;

namespace {

// Minimizer of a unimodal scalar function on [lo, hi]. Extended precision
// keeps function comparisons meaningful near the flat minimum.
template <class F>
double golden_section(F f, long double lo, long double hi)
{
  long double const g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = lo;
  long double b = hi;
  long double c = b - g * (b - a);
  long double d = a + g * (b - a);
  while (b - a > 1e-13L) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return static_cast<double>(0.5L * (a + b));
}

// prox_{sigma f*}(y) = y - sigma prox_{f / sigma}(y / sigma), with the
// primal prox of 1/2 (z - b)^2 written out by hand.
Vector moreau_conj_sq_l2(Vector const &y, double sigma, Vector const &b)
{
  double const t = 1.0 / sigma;
  Vector const u = y / sigma;
  Vector const p = (u + t * b) / (1.0 + t);
  return y - sigma * p;
}

void check_moreau(ProxFn const &f, Vector const &y, double t)
{
  Vector const recon = f.prox(y, t) + t * f.conjugate().prox(y / t, 1.0 / t);
  REQUIRE((recon - y).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + y.cwiseAbs().maxCoeff()));
}

} // namespace

TEST_CASE("soft threshold")
{
  CHECK(prox_l1(Vector{{2.0}}, 1.0, 1.0) == Vector{{1.0}});
  CHECK(prox_l1(Vector{{0.5}}, 1.0, 1.0) == Vector{{0.0}});
  CHECK(prox_l1(Vector{{-2.5}}, 1.0, 1.0) == Vector{{-1.5}});

  Vector const y{{-3.0, 0.2, 1.5}};
  double const t = 0.5;
  double const lambda = 2.0;
  Vector const p = prox_l1(y, t, lambda);
  for (Index j = 0; j < y.size(); ++j) {
    long double const yj = y[j];
    long double const tl = t * lambda;
    double const z =
      golden_section([&](long double s) { return 0.5L * (s - yj) * (s - yj) + tl * std::abs(s); }, -10.0L, 10.0L);
    CHECK(std::abs(p[j] - z) <= 1e-8);
  }
}

TEST_CASE("conjugate of the squared data fit")
{
  CHECK(std::abs(prox_conj_sq_l2(Vector{{4.0}}, 1e-12, Vector{{1.0}})[0] - 4.0) <= 1e-9);
  CHECK(prox_conj_sq_l2(Vector{{2.0}}, 1.0, Vector{{0.0}})[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(moreau_conj_sq_l2(Vector{{2.0}}, 1.0, Vector{{0.0}})[0] == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Vector const y = random_vector(rng, 7);
    Vector const b = random_vector(rng, 7);
    Vector const closed = prox_conj_sq_l2(y, 0.7, b);
    CHECK((closed - moreau_conj_sq_l2(y, 0.7, b)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("conjugate of the l1 norm is an l-inf clamp")
{
  CHECK(prox_conj_l1(Vector{{2.0}}, 0.3, 1.0) == Vector{{1.0}});
  CHECK(prox_conj_l1(Vector{{-0.3}}, 0.3, 1.0) == Vector{{-0.3}});
  CHECK(prox_conj_l1(Vector{{-4.0}}, 5.0, 1.0) == Vector{{-1.0}});

  std::mt19937_64 rng(22);
  Vector const y = random_vector(rng, 9, 2.0);
  double const sigma = 0.3;
  double const lambda = 0.8;
  // prox_{sigma f*}(y) = y - sigma prox_{f/sigma}(y/sigma)
  Vector const oracle = y - sigma * prox_l1(y / sigma, 1.0 / sigma, lambda);
  CHECK((prox_conj_l1(y, sigma, lambda) - oracle).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("primal prox")
{
  CHECK(prox_primal(Vector{{-1.0, 2.0}}, 0.5, PrimalKind::zero) == Vector{{-1.0, 2.0}});
  CHECK(prox_primal(Vector{{-1.0, 2.0}}, 0.5, PrimalKind::nonneg_indicator) == Vector{{0.0, 2.0}});
  CHECK(prox_primal(Vector{{0.0, 3.0}}, 0.5, PrimalKind::nonneg_indicator) == Vector{{0.0, 3.0}});
  CHECK(primal_value(Vector{{-1.0}}, PrimalKind::nonneg_indicator) == std::numeric_limits<double>::infinity());
  CHECK(primal_value(Vector{{-1.0}}, PrimalKind::zero) == 0.0);
}

TEST_CASE("squared l2 prox")
{
  CHECK(prox_sq_l2(Vector{{3.0}}, 1.0, Vector{{1.0}}) == Vector{{2.0}});
  double const z = golden_section(
    [](long double s) { return 0.5L * (s - 3.0L) * (s - 3.0L) + 0.2L * (s + 1.0L) * (s + 1.0L); }, -10.0L, 10.0L);
  CHECK(std::abs(prox_sq_l2(Vector{{3.0}}, 0.4, Vector{{-1.0}})[0] - z) <= 1e-8);
}

TEST_CASE("Moreau identity over random samples")
{
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    Index const n = 1 + static_cast<Index>(trial % 6);
    Vector const y = random_vector(rng, n, 3.0);
    double const t = std::exp(uniform(rng, -4.0, 3.0));
    double const lambda = uniform(rng, 0.05, 4.0);
    Vector const b = random_vector(rng, n);
    switch (trial % 4) {
    case 0: check_moreau(ProxFn::l1_scaled(lambda), y, t); break;
    case 1: check_moreau(ProxFn::linf_ball_proj(lambda), y, t); break;
    case 2: check_moreau(ProxFn::sq_l2_datafit(b), y, t); break;
    case 3: check_moreau(ProxFn::conj_sq_l2_datafit(b), y, t); break;
    }
  }
}

TEST_CASE("firm nonexpansiveness")
{
  std::mt19937_64 rng(24);
  std::vector<ProxFn> const fns{ProxFn::zero(),        ProxFn::nonneg_indicator(),
                                ProxFn::l1_scaled(0.7), ProxFn::linf_ball_proj(0.5),
                                ProxFn::sq_l2_datafit(Vector::Constant(5, 0.3)),
                                ProxFn::conj_sq_l2_datafit(Vector::Constant(5, -0.2))};
  for (auto const &f : fns) {
    for (int trial = 0; trial < 200; ++trial) {
      Vector const y1 = random_vector(rng, 5, 2.0);
      Vector const y2 = random_vector(rng, 5, 2.0);
      double const t = std::exp(uniform(rng, -2.0, 2.0));
      Vector const dp = f.prox(y1, t) - f.prox(y2, t);
      REQUIRE(dp.squaredNorm() <= dp.dot(y1 - y2) + 1e-12);
      REQUIRE(dp.norm() <= (y1 - y2).norm() + 1e-12);
    }
  }
}

TEST_CASE("l1 subgradient optimality")
{
  std::mt19937_64 rng(25);
  double const t = 0.4;
  double const lambda = 1.3;
  for (int trial = 0; trial < 100; ++trial) {
    Vector const y = random_vector(rng, 8);
    Vector const z = prox_l1(y, t, lambda);
    Vector const g = (y - z) / (t * lambda);
    for (Index j = 0; j < y.size(); ++j) {
      if (z[j] > 0.0) { REQUIRE(std::abs(g[j] - 1.0) <= 1e-12); }
      if (z[j] < 0.0) { REQUIRE(std::abs(g[j] + 1.0) <= 1e-12); }
      if (z[j] == 0.0) { REQUIRE(std::abs(g[j]) <= 1.0 + 1e-12); }
    }
  }
}

TEST_CASE("ProxFn values and conjugates")
{
  Vector const b{{1.0, -2.0}};
  auto const fit = ProxFn::sq_l2_datafit(b);
  CHECK(fit.value(Vector{{2.0, 0.0}}) == doctest::Approx(2.5));
  CHECK(fit.conjugate().kind() == ProxFn::Kind::conj_sq_l2_datafit);
  CHECK(fit.conjugate().conjugate().kind() == ProxFn::Kind::sq_l2_datafit);
  // f*(y) = 1/2 |y|^2 + <y, b>
  CHECK(fit.conjugate().value(Vector{{1.0, 1.0}}) == doctest::Approx(1.0 + (1.0 - 2.0)));

  auto const l1 = ProxFn::l1_scaled(2.0);
  CHECK(l1.value(Vector{{1.0, -3.0}}) == doctest::Approx(8.0));
  CHECK(l1.conjugate().kind() == ProxFn::Kind::linf_ball_proj);
  CHECK(l1.conjugate().value(Vector{{1.5, -2.0}}) == 0.0);
  CHECK(l1.conjugate().value(Vector{{2.5}}) == std::numeric_limits<double>::infinity());

  CHECK_THROWS_AS(ProxFn::zero().conjugate(), ConfigError);
  CHECK_THROWS_AS(ProxFn::nonneg_indicator().conjugate(), ConfigError);
  CHECK(ProxFn::nonneg_indicator().value(Vector{{-1.0}}) == std::numeric_limits<double>::infinity());
}
