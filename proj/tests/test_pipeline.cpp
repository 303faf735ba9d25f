#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <vector>

#include "qbrouwer/detail/random.hpp"
#include "qbrouwer/error.hpp"
#include "qbrouwer/maps.hpp"
#include "qbrouwer/pipeline.hpp"

using namespace qbrouwer;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

MapFn constant(Vector c) {
  return [c](const Vector&) { return c; };
}

double nearest_sample_distance(const SampleGrid& g, const Vector& y) {
  return std::sqrt((g.points().colwise() - y).colwise().squaredNorm().minCoeff());
}

}  // namespace

TEST_CASE("PipelineParams validation") {
  PipelineParams p{2, 1.0, 0.6, 0.02, 0.01, 1e-10};
  CHECK_NOTHROW(p.validate());
  CHECK(p.jung_term() == doctest::Approx(1.02 / std::sqrt(3.0)));
  CHECK(p.certified_bound() == doctest::Approx(1.02 / std::sqrt(3.0) + 0.005 + 1e-10));

  PipelineParams below = p;
  below.eps_prime = 0.5;
  try {
    below.validate();
    FAIL("expected a hypothesis error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Hypothesis);
  }

  PipelineParams wide = p;
  wide.gamma = std::sqrt(3.0) * 0.6 - 1.0;
  CHECK_THROWS_AS(wide.validate(), Error);

  PipelineParams coarse = p;
  coarse.alpha = 0.1;
  CHECK_THROWS_AS(coarse.validate(), Error);

  // gamma = alpha = 0.02 for eps' = 0.52 sits exactly on the bound once fp_tol is added.
  PipelineParams edge{1, 1.0, 0.52, 0.02, 0.02, 1e-10};
  CHECK_THROWS_AS(edge.validate(), Error);
  edge.alpha = 0.019;
  CHECK_NOTHROW(edge.validate());
}

TEST_CASE("build_sample_grid in one dimension") {
  const SampleGrid g = build_sample_grid(1, 0.2, as_map(StepMap1D(1.0)));
  std::vector<double> xs(g.points().data(), g.points().data() + g.size());
  std::sort(xs.begin(), xs.end());
  CHECK(xs.front() == -1.0);
  CHECK(xs.back() == 1.0);
  double widest = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) widest = std::max(widest, xs[i] - xs[i - 1]);
  // Each point of [-1, 1] lies within half the widest gap of a sample.
  CHECK(widest / 2.0 <= 0.1);
  CHECK(g.samples().covering_radius() <= 0.1);
  CHECK(g.samples().covering_radius() >= widest / 2.0 - 1e-15);
  CHECK(g.alpha() == 0.2);
}

TEST_CASE("build_sample_grid covers the disk") {
  const SampleGrid g = build_sample_grid(2, 0.2, constant(v2(0.0, 0.0)));
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) worst = std::max(worst, nearest_sample_distance(g, detail::random_in_ball(2, rng)));
  CHECK(worst < 0.1);
  CHECK(probe_covering(g.samples(), 1000, 3) <= g.samples().covering_radius());
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(g.points().col(i).norm() <= 1.0 + 1e-12);

  // Boundary ring: points on the sphere in every direction.
  for (int k = 0; k < 360; ++k) {
    const double t = k * M_PI / 180.0;
    CHECK(nearest_sample_distance(g, v2(std::cos(t), std::sin(t))) < 0.1);
  }
}

TEST_CASE("build_sample_grid evaluates f once per sample") {
  std::atomic<int> calls{0};
  const MapFn f = [&](const Vector& x) {
    ++calls;
    return Vector(-0.5 * x);
  };
  const SampleGrid g = build_sample_grid(2, 0.3, f);
  CHECK(calls.load() == g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK((g.values().col(i) + 0.5 * g.points().col(i)).norm() == 0.0);
}

TEST_CASE("build_sample_grid budget guard") {
  try {
    (void)build_sample_grid(2, 1e-6, constant(v2(0, 0)));
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(e.kind() == ErrorKind::Resource);
    const double a = e.minimal_feasible_alpha();
    CHECK(a > 0.0);
    CHECK(a < 1e-2);
    const SampleGrid ok = build_sample_grid(2, a, constant(v2(0, 0)));
    CHECK(static_cast<std::size_t>(ok.size()) <= kDefaultBudget);
  }
  CHECK_THROWS_AS(build_sample_grid(1, 0.01, constant(v1(0)), 50), ResourceError);
  CHECK_THROWS_AS(build_sample_grid(0, 0.1, constant(v1(0))), Error);
  CHECK_THROWS_AS(build_sample_grid(1, -0.1, constant(v1(0))), Error);
}

TEST_CASE("embed examples") {
  const SampleGrid g = build_sample_grid(1, 0.2, as_map(StepMap1D(1.0)));
  Eigen::Index zero = -1;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g.points()(0, i) == 0.0) zero = i;
  }
  REQUIRE(zero >= 0);
  const EmbeddedPoint e = embed(v1(0.0), g);
  REQUIRE(e.support.size() == 1);
  CHECK(e.support[0] == zero);
  CHECK(e.combination.weights()[0] == 1.0);

  // Two samples 0.04 = (alpha/2) * 0.8 away on either side.
  Eigen::MatrixXd pts(1, 2);
  pts << -0.04, 0.04;
  const SampleGrid pair(SampledMap(PointSet(pts), Eigen::MatrixXd::Zero(1, 2), 0.0), 0.1, 0.08);
  const EmbeddedPoint mid = embed(v1(0.0), pair);
  REQUIRE(mid.support.size() == 2);
  CHECK(mid.combination.weights()[0] == doctest::Approx(0.5));
  CHECK(mid.combination.weights()[1] == doctest::Approx(0.5));

  try {
    (void)embed(v1(0.5), pair);
    FAIL("expected a covering error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::Covering);
  }
  CHECK_THROWS_AS(embed(v1(1.5), g), Error);
}

TEST_CASE("embed weights on random probes") {
  for (int n = 1; n <= 3; ++n) {
    const double alpha = n == 3 ? 0.2 : 0.1;
    const SampleGrid g = build_sample_grid(n, alpha, constant(Vector::Zero(n)));
    std::mt19937_64 rng(40 + n);
    for (int t = 0; t < 2000; ++t) {
      const Vector y = detail::random_in_ball(n, rng);
      const EmbeddedPoint e = embed(y, g);
      double total = 0.0;
      for (double w : e.combination.weights()) {
        CHECK(w > 0.0);
        total += w;
      }
      CHECK(std::abs(total - 1.0) <= kTolWeights);
      CHECK(PointSet(e.combination.points()).diameter() <= alpha);
      for (Eigen::Index i : e.support) CHECK((g.points().col(i) - y).norm() < alpha / 2.0);
      CHECK(std::is_sorted(e.support.begin(), e.support.end()));
    }
  }
}

TEST_CASE("simplicial_image_check") {
  const SampleGrid flat = build_sample_grid(2, 0.2, constant(v2(0.3, 0.1)));
  const SimplicialCheck c = simplicial_image_check(flat, 0.2, 1e-6);
  CHECK(c.passed);
  CHECK(c.edges_checked > 0);
  CHECK(c.image_distance == 0.0);

  // Every pair of extremal image points is eps apart, so eps + gamma always passes.
  for (double alpha : {0.2, 0.1, 0.05}) {
    const SampleGrid g = build_sample_grid(2, alpha, as_map(ExtremalMap(2, 1.0)));
    const SimplicialCheck e = simplicial_image_check(g, alpha, 1.05);
    CHECK(e.passed);
    CHECK(e.image_distance == doctest::Approx(1.0));
  }

  // A jump of eps + 2 gamma across x = 0.
  const MapFn jump = [](const Vector& x) { return v1(x(0) <= 0.0 ? 0.55 : -0.55); };
  const SampleGrid g = build_sample_grid(1, 0.1, jump);
  const SimplicialCheck bad = simplicial_image_check(g, 0.1, 1.05);
  REQUIRE_FALSE(bad.passed);
  const double a = g.points()(0, bad.first);
  const double b = g.points()(0, bad.second);
  CHECK(std::abs(a - b) <= 0.1);
  CHECK(std::min(a, b) <= 0.0);
  CHECK(std::max(a, b) > 0.0);
  CHECK(bad.image_distance == doctest::Approx(1.1));

  // Shrinking the edge length below the spacing leaves no edges to fail.
  CHECK(simplicial_image_check(g, g.spacing() * 0.5, 1.05).passed);
}

TEST_CASE("passing checks stay passing as alpha shrinks") {
  const MapFn f = as_map(ExtremalMap(2, 1.0));
  const SampleGrid g = build_sample_grid(2, 0.1, f);
  for (double bound : {0.5, 0.9, 1.05}) {
    std::vector<bool> results;
    for (double alpha : {0.3, 0.2, 0.1, 0.05, 0.02, 0.01}) results.push_back(simplicial_image_check(g, alpha, bound).passed);
    for (std::size_t i = 1; i < results.size(); ++i) CHECK((!results[i - 1] || results[i]));
  }
}

TEST_CASE("averaged_map_eval") {
  const Vector c = v2(-0.2, 0.7);
  const SampleGrid flat = build_sample_grid(2, 0.1, constant(c));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) CHECK((averaged_map_eval(detail::random_in_ball(2, rng), flat) - c).norm() < 1e-15);

  const SampleGrid g = build_sample_grid(2, 0.1, as_map(ExtremalMap(2, 1.0)));
  const Vector z = g.points().col(g.size() / 3);
  CHECK((averaged_map_eval(z, g) - g.values().col(g.size() / 3)).norm() == 0.0);

  const SampleGrid rot = build_sample_grid(2, 0.1, [](const Vector& x) { return Vector(v2(-x(1), x(0))); });
  for (int t = 0; t < 2000; ++t) CHECK(averaged_map_eval(detail::random_in_ball(2, rng), rot).norm() <= 1.0 + kTolGeom);
}

TEST_CASE("find_fixed_point") {
  const Vector c = v2(0.3, -0.4);
  FixedPointResult r = find_fixed_point(constant(c), 2);
  CHECK((r.y - c).norm() <= 1e-10);
  CHECK(r.residual <= 1e-10);

  r = find_fixed_point([](const Vector& x) { return Vector(-x); }, 1);
  CHECK(std::abs(r.y(0)) <= 1e-10);

  // Contraction toward (0.5, 0.5) with a twist.
  const MapFn twist = [](const Vector& x) {
    Vector y = v2(0.5, 0.5) + 0.5 * v2(-(x(1) - 0.5), x(0) - 0.5);
    return Vector(y / std::max(1.0, y.norm()));
  };
  r = find_fixed_point(twist, 2);
  CHECK((twist(r.y) - r.y).norm() <= 1e-10);
  CHECK((r.y - v2(0.5, 0.5)).norm() < 1e-8);

  // Retraction onto the sphere: every boundary point in one direction is fixed.
  const MapFn push = [](const Vector& x) {
    Vector y = x + v2(0.3, 0.0);
    return Vector(y / std::max(1.0, y.norm()));
  };
  r = find_fixed_point(push, 2);
  CHECK((push(r.y) - r.y).norm() <= 1e-10);

  FixedPointOptions tiny;
  tiny.max_evaluations = 3;
  try {
    (void)find_fixed_point(twist, 2, tiny);
    FAIL("expected no convergence");
  } catch (const NoConvergenceError& e) {
    CHECK(e.kind() == ErrorKind::NoConvergence);
    CHECK(e.best_residual() > 0.0);
  }
}

TEST_CASE("extract_certificate for a constant map") {
  const Vector c = v2(0.25, 0.0);
  PipelineParams p{2, 0.05, 0.1, 0.0, 0.05, 1e-10};
  p.gamma = (jung_radius(2) * p.eps_prime - p.eps) / 2.0;
  REQUIRE_NOTHROW(p.validate());
  const SampleGrid g = build_sample_grid(2, p.alpha, constant(c));
  FixedPointResult fp{c, 0.0, 1};
  const EpsFixedPointCertificate cert = extract_certificate(fp, g, p);
  CHECK(cert.displacement <= p.alpha / 2.0);
  CHECK(cert.displacement == doctest::Approx(nearest_sample_distance(g, c)));
  CHECK(cert.sample_to_point == doctest::Approx(nearest_sample_distance(g, c)));

  FixedPointResult off{c, 1e-3, 1};
  CHECK_THROWS_AS(extract_certificate(off, g, p), Error);
}

TEST_CASE("run_pipeline end to end") {
  SUBCASE("step map") {
    for (double eps_prime : {0.51, 0.52, 0.55, 0.75}) {
      CAPTURE(eps_prime);
      const StepMap1D step(1.0);
      const PipelineRun run = run_pipeline(as_map(step), 1, 1.0, eps_prime);
      const EpsFixedPointCertificate& cert = run.certificate;
      const double z = cert.z(0);
      CHECK(std::abs(step(z) - z) == run.verified_displacement);
      CHECK(run.verified_displacement < eps_prime);
      CHECK(cert.image_to_average <= run.params.jung_term() + kTolGeom);
      CHECK(cert.sample_to_point < run.params.alpha / 2.0);
      CHECK(cert.residual <= run.params.fp_tol);
      CHECK(cert.displacement <= cert.image_to_average + cert.residual + cert.sample_to_point + kTolGeom);
      CHECK(run.params.gamma == doctest::Approx((2.0 * eps_prime - 1.0) / 2.0));
      CHECK(run.simplicial.passed);
      // Any eps'-fixed point of the step map lies in [eps/2 - eps', eps' - eps/2].
      CHECK(std::abs(z) <= eps_prime - 0.5 + 1e-12);
    }
  }

  SUBCASE("extremal map") {
    for (double eps_prime : {0.60, 0.62, 0.70}) {
      const PipelineRun run = run_pipeline(as_map(ExtremalMap(2, 1.0)), 2, 1.0, eps_prime);
      CHECK(run.verified_displacement < eps_prime);
      CHECK(run.verified_displacement >= 1.0 / std::sqrt(3.0) - run.params.alpha / 2.0 - run.params.fp_tol);
    }
  }

  SUBCASE("sharpness at ten percent margin") {
    for (int n : {1, 2}) {
      // eps <= R_n keeps the image points inside the ball.
      for (double eps : {0.5, 1.0, std::min(2.0, jung_radius(n))}) {
        const double floor = eps / jung_radius(n);
        const PipelineRun run = run_pipeline(as_map(ExtremalMap(n, eps)), n, eps, floor * 1.1);
        CHECK(run.verified_displacement < floor * 1.1);
        CHECK(run.verified_displacement >= floor - run.params.alpha / 2.0 - run.params.fp_tol);
      }
    }
  }

  SUBCASE("constant map") {
    const Vector c = v2(0.25, 0.0);
    const PipelineRun run = run_pipeline(constant(c), 2, 0.05, 0.1);
    CHECK(run.verified_displacement <= run.params.alpha / 2.0);
  }

  SUBCASE("hypothesis and budget failures") {
    try {
      (void)run_pipeline(as_map(StepMap1D(1.0)), 1, 1.0, 0.49);
      FAIL("expected a hypothesis error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Hypothesis);
    }
    CHECK_THROWS_AS(run_pipeline(as_map(StepMap1D(1.0)), 1, 1.0, 0.5), Error);
    PipelineOptions small;
    small.budget = 100;
    CHECK_THROWS_AS(run_pipeline(as_map(StepMap1D(1.0)), 1, 1.0, 0.501, small), ResourceError);
    CHECK_THROWS_AS(run_pipeline(as_map(StepMap1D(1.0)), 1, 2.5, 2.0), Error);
    // With eps > R_n the extremal images leave the disk, so f is not a self-map.
    try {
      (void)run_pipeline(as_map(ExtremalMap(2, 2.0)), 2, 2.0, 1.3);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }
}
