#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "qbrouwer/detail/random.hpp"
#include "qbrouwer/geometry.hpp"
#include "qbrouwer/maps.hpp"
#include "qbrouwer/pipeline.hpp"

namespace qbrouwer {

/// Brute-force grid over [-1, 1]^dim with `points_per_axis` equispaced
/// values per axis. With `clip` the grid is restricted to the unit ball and
/// the outermost shell is projected onto the sphere.
struct GridSpec {
  int dim = 1;
  int points_per_axis = 201;
  bool clip = true;
  std::size_t budget = kDefaultBudget;

  double step() const { return 2.0 / (points_per_axis - 1); }
};

/// Throws Resource when points_per_axis^dim exceeds the budget.
PointSet grid_points(const GridSpec& spec);

struct GridMinimum {
  Vector argmin;
  double value = 0.0;
  std::size_t points = 0;
};

/// Exhaustive minimum of |x - f(x)| over the grid; the lowest grid index wins
/// ties. Chunks run on worker threads, so f must be safe to call concurrently.
GridMinimum min_displacement_grid(const MapFn& f, const GridSpec& spec);

/// Allowed excess of the grid minimum over eps / R_n, in grid steps.
inline constexpr double kTightnessSlack = 2.0;

struct TightnessReport {
  int dim = 1;
  double eps = 1.0;
  int points_per_axis = 0;
  double grid_step = 0.0;
  std::size_t grid_points = 0;
  double min_displacement = 0.0;
  Vector argmin;
  double theoretical_bound = 0.0;  // eps / R_n
  double gap = 0.0;                // min_displacement - theoretical_bound
  /// -kTolGeom <= gap <= kTightnessSlack * grid_step
  bool holds = false;
};

TightnessReport tightness_report(int n, double eps, const GridSpec& spec);

struct JungCounterexample {
  enum class Kind { NearestPoint, EnclosingBall };

  Kind kind = Kind::NearestPoint;
  int trial = 0;
  Eigen::MatrixXd points;
  Vector y;            // the convex combination (NearestPoint only)
  double value = 0.0;  // nearest distance or ball radius
  double bound = 0.0;  // diameter / R_n + kTolGeom
};

struct JungTestResult {
  int dim = 1;
  int trials = 0;
  double worst_nearest_ratio = 0.0;  // max of distance / (diameter / R_n)
  double worst_ball_ratio = 0.0;     // max of radius / (diameter / R_n)
  std::optional<JungCounterexample> counterexample;

  bool passed() const { return !counterexample.has_value(); }
};

/// Random point sets in B^n (1..points_per_set points) with random convex
/// combinations; checks both the nearest-point form of Jung's theorem and
/// the enclosing-ball radius. Stops at the first violation.
JungTestResult jung_random_test(int n, int trials, int points_per_set, std::uint64_t seed = detail::kDefaultSeed);

/// modulus_estimate of f sampled on the grid; requires r > grid step.
double modulus_grid(const MapFn& f, double r, const GridSpec& spec);

/// CSV rows "x0,...,x{n-1},displacement" for every grid point.
void write_displacement_csv(std::ostream& out, const MapFn& f, const GridSpec& spec);

}  // namespace qbrouwer
