#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "qbrouwer/detail/random.hpp"
#include "qbrouwer/error.hpp"
#include "qbrouwer/geometry.hpp"

using namespace qbrouwer;

namespace {

Eigen::MatrixXd cols(std::initializer_list<std::initializer_list<double>> pts) {
  const auto n = static_cast<Eigen::Index>(pts.begin()->size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (const auto& p : pts) {
    Eigen::Index i = 0;
    for (double v : p) m(i++, j) = v;
    ++j;
  }
  return m;
}

// Brute force: the smallest ball is the circumball of some subset of at most
// n+1 points, so try every subset and keep the smallest that encloses all.
double brute_force_min_radius(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  const int m = static_cast<int>(p.cols());
  double best = INFINITY;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    if (static_cast<int>(s.size()) > n + 1) continue;
    // center = p0 + A t with |c - p_k|^2 = |c - p0|^2 for each k.
    const int k = static_cast<int>(s.size()) - 1;
    Eigen::VectorXd center = p.col(s[0]);
    if (k > 0) {
      Eigen::MatrixXd a(n, k);
      for (int j = 0; j < k; ++j) a.col(j) = p.col(s[j + 1]) - p.col(s[0]);
      const Eigen::MatrixXd g = a.transpose() * a;
      if (std::abs(g.determinant()) < 1e-14) continue;
      Eigen::VectorXd rhs(k);
      for (int j = 0; j < k; ++j) rhs(j) = 0.5 * g(j, j);
      center += a * g.lu().solve(rhs);
    }
    double r = 0.0;
    for (int i : s) r = std::max(r, (p.col(i) - center).norm());
    bool encloses = true;
    for (int i = 0; i < m; ++i) encloses = encloses && (p.col(i) - center).norm() <= r + 1e-10;
    if (encloses) best = std::min(best, r);
  }
  return best;
}

Eigen::MatrixXd random_points(int n, int m, std::mt19937_64& rng) {
  Eigen::MatrixXd p(n, m);
  for (int j = 0; j < m; ++j) p.col(j) = detail::random_in_ball(n, rng);
  return p;
}

}  // namespace

TEST_CASE("jung_radius matches the closed form") {
  CHECK(jung_radius(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(jung_radius(2) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(jung_radius(3) == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-14));
  CHECK(std::abs(jung_radius(2) - 1.7320508075688772) < 1e-12);
  CHECK(std::abs(jung_radius(3) - 1.6329931618554521) < 1e-12);
  CHECK_THROWS_AS(jung_radius(0), Error);
  CHECK_THROWS_AS(jung_radius(-3), Error);
}

TEST_CASE("jung_radius decreases toward sqrt(2)") {
  for (int n = 1; n <= 32; ++n) {
    CHECK(jung_radius(n + 1) < jung_radius(n));
    CHECK(jung_radius(n) > std::sqrt(2.0));
  }
  CHECK(jung_radius(100000) - std::sqrt(2.0) < 1e-4);
}

TEST_CASE("regular simplex vertices") {
  const PointSet v1 = regular_simplex_vertices(1);
  REQUIRE(v1.size() == 2);
  CHECK(v1.matrix()(0, 0) == doctest::Approx(-1.0));
  CHECK(v1.matrix()(0, 1) == doctest::Approx(1.0));
  CHECK(v1.diameter() == doctest::Approx(2.0));

  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    const Eigen::MatrixXd v = regular_simplex_vertices(n).matrix();
    REQUIRE(v.rows() == n);
    REQUIRE(v.cols() == n + 1);
    const Eigen::MatrixXd gram = v.transpose() * v;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double expected = i == j ? 1.0 : -1.0 / n;
        CHECK(std::abs(gram(i, j) - expected) < kTolGeom);
        if (i != j) CHECK(std::abs((v.col(i) - v.col(j)).norm() - jung_radius(n)) < kTolGeom);
      }
    }
    CHECK(v.rowwise().sum().norm() < kTolGeom);
  }
  CHECK_THROWS_AS(regular_simplex_vertices(0), Error);
}

TEST_CASE("diameter") {
  CHECK(diameter(PointSet(cols({{0.0, 0.0}}))) == 0.0);
  CHECK(diameter(PointSet(cols({{-1.0}, {1.0}}))) == doctest::Approx(2.0));
  CHECK(std::abs(regular_simplex_vertices(2).diameter() - std::sqrt(3.0)) < kTolGeom);

  const PointSet p(cols({{0.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}}));
  const PointSet copy = p;
  CHECK(copy.diameter() == doctest::Approx(5.0));
  CHECK(p.diameter() == doctest::Approx(5.0));
}

TEST_CASE("PointSet rejects empty and non-finite input") {
  CHECK_THROWS_AS(PointSet(Eigen::MatrixXd(2, 0)), Error);
  Eigen::MatrixXd bad = cols({{0.0, NAN}});
  CHECK_THROWS_AS(PointSet{bad}, Error);
  std::vector<Vector> mixed{Vector::Zero(2), Vector::Zero(3)};
  CHECK_THROWS_AS(PointSet::from_points(mixed), Error);
}

TEST_CASE("min_enclosing_ball fixed examples") {
  const Ball pair = min_enclosing_ball(PointSet(cols({{-1.0}, {1.0}})));
  CHECK(pair.center(0) == doctest::Approx(0.0));
  CHECK(pair.radius == doctest::Approx(1.0));

  const Ball tri = min_enclosing_ball(PointSet(cols({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}})));
  CHECK(std::abs(tri.radius - 1.0 / std::sqrt(3.0)) < kTolGeom);
  CHECK(std::abs(tri.center(0) - 0.5) < kTolGeom);
  CHECK(std::abs(tri.center(1) - std::sqrt(3.0) / 6.0) < kTolGeom);

  for (int n = 1; n <= 5; ++n) {
    const Ball b = min_enclosing_ball(regular_simplex_vertices(n));
    CHECK(b.center.norm() < kTolGeom);
    CHECK(std::abs(b.radius - 1.0) < kTolGeom);
  }

  // Obtuse triangle: the ball is set by the long side alone.
  const Ball obtuse = min_enclosing_ball(PointSet(cols({{-1.0, 0.0}, {1.0, 0.0}, {0.0, 0.1}})));
  CHECK(obtuse.radius == doctest::Approx(1.0));
  CHECK(obtuse.center.norm() < kTolGeom);

  const Ball single = min_enclosing_ball(PointSet(cols({{0.3, -0.2, 0.1}})));
  CHECK(single.radius == 0.0);
}

TEST_CASE("min_enclosing_ball agrees with brute force and Jung's bound") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    const int m = 1 + static_cast<int>(rng() % 10);
    const Eigen::MatrixXd p = random_points(n, m, rng);
    const PointSet set(p);
    const Ball b = min_enclosing_ball(set);
    CAPTURE(trial);
    for (int j = 0; j < m; ++j) CHECK(b.contains(p.col(j)));
    CHECK(b.radius <= set.diameter() / jung_radius(n) + kTolGeom);
    if (m <= 8) CHECK(std::abs(b.radius - brute_force_min_radius(p)) < 1e-9);

    // Minimality: a smaller ball around the same center drops a point.
    const Ball shrunk{b.center, b.radius - 10 * kTolGeom};
    bool drops = false;
    for (int j = 0; j < m; ++j) drops = drops || !shrunk.contains(p.col(j), 0.0);
    if (b.radius > 10 * kTolGeom) CHECK(drops);
  }
}

TEST_CASE("ConvexCombination validation") {
  CHECK_THROWS_AS(ConvexCombination(cols({{0.0}, {1.0}}), {0.5, 0.6}), Error);
  CHECK_THROWS_AS(ConvexCombination(cols({{0.0}, {1.0}}), {1.0, 0.0}), Error);
  CHECK_THROWS_AS(ConvexCombination(cols({{0.0}, {1.0}}), {1.0}), Error);
  CHECK_THROWS_AS(ConvexCombination(cols({{0.0}, {1.0}}), {1.5, -0.5}), Error);
  CHECK_NOTHROW(ConvexCombination(cols({{0.0}, {1.0}}), {0.5, 0.5 + 5e-13}));
  try {
    ConvexCombination(cols({{0.0}, {1.0}}), {0.5, 0.6});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidCombination);
  }
}

TEST_CASE("eval_combination") {
  Vector r = eval_combination(ConvexCombination(cols({{1.0, 0.0}}), {1.0}));
  CHECK(r(0) == 1.0);
  CHECK(r(1) == 0.0);

  r = eval_combination(ConvexCombination(cols({{-1.0}, {1.0}}), {0.5, 0.5}));
  CHECK(r(0) == doctest::Approx(0.0));

  r = eval_combination(ConvexCombination(regular_simplex_vertices(2), {1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK(r.norm() < kTolGeom);
}

TEST_CASE("eval_combination stays inside every facet halfspace") {
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> expo(1.0);
  for (int n = 1; n <= 4; ++n) {
    const Eigen::MatrixXd v = regular_simplex_vertices(n).matrix();
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> w(static_cast<std::size_t>(n + 1));
      double total = 0.0;
      for (double& x : w) total += (x = expo(rng));
      for (double& x : w) x /= total;
      const Vector y = eval_combination(ConvexCombination(v, w));
      // The facet opposite x_i is {z : z . x_i = -1/n}; the simplex lies on the x_i side.
      for (int i = 0; i <= n; ++i) CHECK(y.dot(v.col(i)) >= -1.0 / n - kTolGeom);
    }
  }
}

TEST_CASE("jung_nearest examples") {
  NearestSupport s = jung_nearest(ConvexCombination(cols({{0.4, -0.1}}), {1.0}));
  CHECK(s.index == 0);
  CHECK(s.distance == 0.0);

  s = jung_nearest(ConvexCombination(cols({{-1.0}, {1.0}}), {0.5, 0.5}));
  CHECK(s.index == 0);
  CHECK(s.distance == doctest::Approx(1.0));
  CHECK(std::abs(s.distance - 2.0 / jung_radius(1)) < kTolGeom);

  for (int n = 1; n <= 4; ++n) {
    const double eps = 1.0;
    const Eigen::MatrixXd v = regular_simplex_vertices(n).matrix() * (eps / jung_radius(n));
    const std::vector<double> w(static_cast<std::size_t>(n + 1), 1.0 / (n + 1));
    s = jung_nearest(ConvexCombination(v, w));
    CHECK(std::abs(s.distance - eps / jung_radius(n)) < kTolGeom);
    CHECK(s.index == 0);
  }
}

TEST_CASE("jung_nearest stays within diameter / R_n on random combinations") {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + trial % 4;
    const int m = 1 + static_cast<int>(rng() % 10);
    const Eigen::MatrixXd p = random_points(n, m, rng);
    std::vector<double> w(static_cast<std::size_t>(m));
    double total = 0.0;
    for (double& x : w) total += (x = expo(rng));
    for (double& x : w) x /= total;
    const ConvexCombination c(p, w);
    const NearestSupport s = jung_nearest(c);
    const Vector y = eval_combination(c);
    double brute = INFINITY;
    for (int j = 0; j < m; ++j) brute = std::min(brute, (p.col(j) - y).norm());
    CHECK(s.distance == doctest::Approx(brute).epsilon(1e-12));
    CHECK(s.distance <= PointSet(p).diameter() / jung_radius(n) + kTolGeom);
  }
}
