#include "aspdhg/diag.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

using namespace aspdhg;

namespace {

double eigen_min(Matrix const &m)
{
  return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues()[0];
}

double spectral_norm(Matrix const &m)
{
  return m.jacobiSvd().singularValues()[0];
}

TvCtOptions tiny_ct()
{
  TvCtOptions o;
  o.geometry.grid = 8;
  o.geometry.n_angles = 8;
  o.geometry.n_detectors = 11;
  o.n_batches = 4;
  o.lambda = 0.3;
  return o;
}

IterationTrace ratio_trace(std::vector<double> const &ratios)
{
  IterationTrace t;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    IterationRecord r;
    r.k = static_cast<long>(k);
    r.ratio = ratios[k];
    r.objective = std::numeric_limits<double>::quiet_NaN();
    t.records.push_back(r);
  }
  return t;
}

} // namespace

TEST_CASE("metric eigenvalue examples")
{
  MetricBlock zero{1.0, 1.0, Matrix::Zero(2, 3)};
  CHECK(metric_min_eig(zero) == doctest::Approx(1.0).epsilon(1e-14));

  // [[1, 1], [1, 1]] has eigenvalues 0 and 2.
  MetricBlock scalar{1.0, 1.0, Matrix::Constant(1, 1, 1.0)};
  CHECK(std::abs(metric_min_eig(scalar)) <= 1e-14);

  MetricBlock diag{2.0, 3.0, Matrix::Zero(1, 1)};
  CHECK(metric_min_eig(diag) == doctest::Approx(2.0));

  CHECK_THROWS_AS(metric_min_eig(MetricBlock{1.0, 1.0, Matrix::Zero(150, 60)}), ConfigError);
  CHECK_THROWS_AS(jacobi_eigenvalues(Matrix::Zero(2, 3)), ConfigError);
}

TEST_CASE("Jacobi eigenvalues match a library eigensolver")
{
  std::mt19937_64 rng(61);
  for (int t = 0; t < 50; ++t) {
    Index const n = 1 + t % 12;
    Matrix a = testutil::random_matrix(rng, n, n);
    a = (a + a.transpose()).eval();
    Vector const mine = jacobi_eigenvalues(a);
    Vector const ref = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues();
    REQUIRE((mine - ref).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("sampled metric is PSD exactly when the step product is at most one")
{
  std::mt19937_64 rng(62);
  int psd = 0;
  int indefinite = 0;
  for (int t = 0; t < 500; ++t) {
    Index const rows = 1 + t % 5;
    Index const cols = 1 + (t / 5) % 4;
    Matrix const a = testutil::random_matrix(rng, rows, cols);
    double const na = spectral_norm(a);
    double const p = testutil::uniform(rng, 0.05, 1.0);
    double const tau = std::exp(testutil::uniform(rng, -4.0, 2.0));
    double const prod = testutil::uniform(rng, 0.2, 1.8);
    double const sigma = prod * p / (tau * na * na);
    if (std::abs(prod - 1.0) < 1e-3) { continue; }

    auto const m = sampled_metric(tau, sigma, p, a);
    double const scale = m.assemble().cwiseAbs().maxCoeff();
    double const lmin = metric_min_eig(m);
    REQUIRE(std::abs(lmin - eigen_min(m.assemble())) <= 1e-9 * scale);
    if (prod < 1.0) {
      REQUIRE(lmin >= -1e-12 * scale);
      ++psd;
    } else {
      REQUIRE(lmin < 0.0);
      ++indefinite;
    }

    // With a beta shift the threshold moves to beta^2.
    double const beta = 0.9;
    double const shifted = metric_min_eig_shifted(m, beta);
    if (prod < beta * beta - 1e-3) { REQUIRE(shifted >= -1e-12 * scale); }
    if (prod > beta * beta + 1e-3) { REQUIRE(shifted < 0.0); }
  }
  CHECK(psd > 100);
  CHECK(indefinite > 100);
}

TEST_CASE("sampled metrics along a feasible run are PSD")
{
  auto const inst = build_tv_ct(tiny_ct());
  std::vector<Matrix> dense;
  for (auto const &b : inst.problem.blocks) { dense.push_back(testutil::materialize(b.op)); }
  for (Rule rule : {Rule::fixed, Rule::a, Rule::b}) {
    SolverOptions o;
    o.controller.rule = rule;
    o.epochs = 20;
    o.seed = 5;
    o.ratio0 = 1e-2;
    auto const res = run(inst.problem, o);
    auto const &recs = res.trace.records;
    for (std::size_t k = 0; k < recs.size(); k += 7) {
      auto const &r = recs[k];
      auto const m = sampled_metric(r.tau, r.sigma, inst.problem.blocks[r.i].prob, dense[r.i]);
      double const scale = std::max(m.a, m.b);
      REQUIRE(metric_min_eig(m) >= -1e-10 * scale);
    }
  }
}

TEST_CASE("reference solution matches least squares")
{
  std::mt19937_64 rng(63);
  Matrix const a = testutil::random_matrix(rng, 14, 10) + 3.0 * Matrix::Identity(14, 10);
  Vector const b = testutil::random_vector(rng, 14);
  SaddleProblem p;
  p.primal_dim = 10;
  add_block(p, LinearMap::from_dense(a.topRows(7)), ProxFn::sq_l2_datafit(b.head(7)), 0.5);
  add_block(p, LinearMap::from_dense(a.bottomRows(7)), ProxFn::sq_l2_datafit(b.tail(7)), 0.5);

  Vector const ls = a.colPivHouseholderQr().solve(b);
  double const f_ls = 0.5 * (a * ls - b).squaredNorm();

  ReferenceOptions ro;
  ro.iters = 20000;
  ro.ratio = 1.0;
  auto const ref = reference_solution(p, ro);
  CHECK(ref.ratio == 1.0);
  CHECK(ref.f_star >= f_ls - 1e-12);
  CHECK(ref.f_star - f_ls <= 1e-10 * f_ls);
  CHECK((ref.x - ls).norm() <= 1e-6 * ls.norm());

  ro.ratio = 0.0;
  ro.iters = 2000;
  auto const pilot = reference_solution(p, ro);
  CHECK(pilot.ratio > 0.0);
  CHECK(pilot.f_star >= f_ls - 1e-12);

  ro.iters = 0;
  CHECK_THROWS_AS(reference_solution(p, ro), ConfigError);
}

TEST_CASE("reference F* on a CT instance")
{
  auto const inst = build_tv_ct(tiny_ct());
  ReferenceOptions ro;
  ro.iters = 20000;
  auto const a = reference_solution(inst.problem, ro);
  CHECK(a.f_star <= objective(inst.problem, Vector::Zero(inst.problem.primal_dim)));
  CHECK(a.f_star == doctest::Approx(objective(inst.problem, a.x)).epsilon(1e-6));
  ro.iters = 40000;
  ro.ratio = a.ratio;
  auto const b = reference_solution(inst.problem, ro);
  CHECK(b.f_star <= a.f_star);
  CHECK((a.f_star - b.f_star) / b.f_star < 1e-8);
}

TEST_CASE("relative suboptimality and threshold epochs")
{
  IterationTrace t = ratio_trace(std::vector<double>(6, 1.0));
  t.records[1].objective = 3.0;
  t.records[1].epoch = 0;
  t.records[3].objective = 2.2;
  t.records[3].epoch = 1;
  t.records[5].objective = 2.001;
  t.records[5].epoch = 2;
  auto const s = relative_suboptimality(t, 2.0);
  REQUIRE(s.size() == 3);
  CHECK(s[0].second == doctest::Approx(0.5));
  CHECK(s[1].second == doctest::Approx(0.1));
  CHECK(s[2].second == doctest::Approx(5e-4));
  CHECK(epochs_to_threshold(s, 1e-3) == 3);
  CHECK(epochs_to_threshold(s, 0.2) == 2);
  CHECK(epochs_to_threshold(s, 1e-6) == -1);
  CHECK_THROWS_AS(relative_suboptimality(t, std::numeric_limits<double>::infinity()), ConfigError);

  auto const zero = relative_suboptimality(t, 0.0);
  CHECK(zero[0].second == doctest::Approx(3.0 / kSuboptGuard));
}

TEST_CASE("ratio stabilization")
{
  auto const flat = ratio_trace({1.0, 1.0, 1.0, 1.0});
  CHECK(ratio_stabilization(flat, 3) == 0.0);

  auto const jumps = ratio_trace({1.0, 1000.0, 10.0, 10.0, 20.0});
  CHECK(ratio_stabilization(jumps, 5) == doctest::Approx(3.0));
  CHECK(ratio_stabilization(jumps, 2) == doctest::Approx(std::log10(2.0)));
  CHECK(ratio_stabilization(jumps, 3) == doctest::Approx(2.0));
  CHECK_THROWS_AS(ratio_stabilization(jumps, 6), ConfigError);
  CHECK_THROWS_AS(ratio_stabilization(jumps, 0), ConfigError);
}

TEST_CASE("iterate difference decay")
{
  IterationTrace t = ratio_trace(std::vector<double>(20, 1.0));
  for (std::size_t k = 0; k < 20; ++k) { t.records[k].dx_norm = k < 2 ? 4.0 : (k >= 18 ? 1.0 : 2.0); }
  CHECK(iterate_difference_decay(t, 0.1) == doctest::Approx(0.25));
  t.records[1].dx_norm = 8.0;
  CHECK(iterate_difference_decay(t, 0.1) == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(iterate_difference_decay(ratio_trace({1.0}), 0.1), ConfigError);
}

TEST_CASE("summary CSV")
{
  std::ostringstream os;
  write_summary_header(os);
  SummaryRow row;
  row.run = "r";
  row.rule = "a";
  row.mode = "paper";
  row.ratio0 = 1e-5;
  row.seed = 2;
  row.epochs = 10;
  row.status = "ok";
  row.final_objective = 1.5;
  row.final_subopt = std::numeric_limits<double>::quiet_NaN();
  row.epochs_to_threshold = -1;
  row.final_ratio = 0.25;
  row.stabilization = 0.0;
  write_summary_row(os, row);
  CHECK(os.str() ==
        "run,rule,mode,ratio0,seed,epochs,status,final_objective,final_subopt,epochs_to_threshold,final_ratio,"
        "stabilization\n"
        "r,a,paper,1e-05,2,10,ok,1.5,,-1,0.25,0\n");
}
