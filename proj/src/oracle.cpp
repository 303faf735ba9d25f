#include "qbrouwer/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>
#include <vector>

#include "qbrouwer/detail/lattice.hpp"
#include "qbrouwer/error.hpp"

namespace qbrouwer {

PointSet grid_points(const GridSpec& spec) {
  if (spec.dim < 1) {
    throw Error(ErrorKind::InvalidDimension, fmt::format("dimension must be >= 1, got {}", spec.dim));
  }
  if (spec.points_per_axis < 2) {
    throw Error(ErrorKind::InvalidArgument, "a grid needs at least 2 points per axis");
  }
  const std::size_t total = detail::product_count(static_cast<std::size_t>(spec.points_per_axis), spec.dim);
  if (total > spec.budget) {
    throw ResourceError(fmt::format("{}^{} grid points exceed the budget of {}", spec.points_per_axis, spec.dim,
                                    spec.budget),
                        0.0);
  }
  std::vector<double> axis(static_cast<std::size_t>(spec.points_per_axis));
  for (int k = 0; k < spec.points_per_axis; ++k) {
    axis[static_cast<std::size_t>(k)] = -1.0 + spec.step() * k;
  }
  axis.back() = 1.0;
  return PointSet(
      detail::ball_lattice(spec.dim, axis, spec.step() * std::sqrt(double(spec.dim)) / 2.0, spec.clip));
}

GridMinimum min_displacement_grid(const MapFn& f, const GridSpec& spec) {
  const PointSet grid = grid_points(spec);
  const Eigen::MatrixXd& pts = grid.matrix();
  const auto count = static_cast<std::size_t>(pts.cols());

  struct Local {
    double value = std::numeric_limits<double>::infinity();
    Eigen::Index index = -1;
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, count / 4096));
  std::vector<Local> partial(workers);
  auto scan = [&](std::size_t w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    Local best;
    for (std::size_t i = begin; i < end; ++i) {
      const Vector x = pts.col(static_cast<Eigen::Index>(i));
      const double d = (x - f(x)).norm();
      if (d < best.value) best = {d, static_cast<Eigen::Index>(i)};
    }
    partial[w] = best;
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(scan, w);
  }

  Local best;
  for (const Local& p : partial) {
    if (p.value < best.value) best = p;
  }
  return GridMinimum{pts.col(best.index), best.value, count};
}

TightnessReport tightness_report(int n, double eps, const GridSpec& spec) {
  const ExtremalMap map(n, eps);
  GridSpec s = spec;
  s.dim = n;
  const GridMinimum minimum = min_displacement_grid(as_map(map), s);

  TightnessReport report;
  report.dim = n;
  report.eps = eps;
  report.points_per_axis = s.points_per_axis;
  report.grid_step = s.step();
  report.grid_points = minimum.points;
  report.min_displacement = minimum.value;
  report.argmin = minimum.argmin;
  report.theoretical_bound = eps / jung_radius(n);
  report.gap = report.min_displacement - report.theoretical_bound;
  report.holds = report.gap >= -kTolGeom && report.gap <= kTightnessSlack * report.grid_step;
  return report;
}

JungTestResult jung_random_test(int n, int trials, int points_per_set, std::uint64_t seed) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidDimension, fmt::format("dimension must be >= 1, got {}", n));
  }
  if (trials < 0 || points_per_set < 1) {
    throw Error(ErrorKind::InvalidArgument, "trials must be >= 0 and points_per_set >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> set_size(1, points_per_set);
  std::exponential_distribution<double> expo(1.0);
  const double rn = jung_radius(n);

  JungTestResult result;
  result.dim = n;
  for (int t = 0; t < trials; ++t) {
    const int k = set_size(rng);
    Eigen::MatrixXd pts(n, k);
    for (int i = 0; i < k; ++i) pts.col(i) = detail::random_in_ball(n, rng);
    std::vector<double> weights(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& w : weights) {
      w = expo(rng) + 1e-12;
      total += w;
    }
    for (double& w : weights) w /= total;

    const PointSet set(pts);
    const double scale = set.diameter() / rn;
    const ConvexCombination combo(set, weights);
    const NearestSupport nearest = jung_nearest(combo);
    const Ball ball = min_enclosing_ball(set);
    ++result.trials;
    if (scale > 0.0) {
      result.worst_nearest_ratio = std::max(result.worst_nearest_ratio, nearest.distance / scale);
      result.worst_ball_ratio = std::max(result.worst_ball_ratio, ball.radius / scale);
    }
    if (nearest.distance > scale + kTolGeom) {
      result.counterexample = JungCounterexample{JungCounterexample::Kind::NearestPoint, t, pts,
                                                 eval_combination(combo), nearest.distance, scale + kTolGeom};
      return result;
    }
    if (ball.radius > scale + kTolGeom) {
      result.counterexample = JungCounterexample{JungCounterexample::Kind::EnclosingBall, t, pts, ball.center,
                                                 ball.radius, scale + kTolGeom};
      return result;
    }
  }
  return result;
}

double modulus_grid(const MapFn& f, double r, const GridSpec& spec) {
  if (!(r > spec.step())) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("modulus scale {} must exceed the grid step {}", r, spec.step()));
  }
  PointSet grid = grid_points(spec);
  const SampledMap sampled = sample_map(f, std::move(grid), spec.step() * std::sqrt(double(spec.dim)) / 2.0);
  return modulus_estimate(sampled, r).value;
}

void write_displacement_csv(std::ostream& out, const MapFn& f, const GridSpec& spec) {
  const PointSet grid = grid_points(spec);
  for (int d = 0; d < spec.dim; ++d) out << 'x' << d << ',';
  out << "displacement\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Vector x = grid.point(i);
    for (int d = 0; d < spec.dim; ++d) out << fmt::format("{},", x(d));
    out << fmt::format("{}\n", (x - f(x)).norm());
  }
}

}  // namespace qbrouwer
