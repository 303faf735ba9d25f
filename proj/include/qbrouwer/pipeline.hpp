#pragma once

#include <cstddef>
#include <vector>

#include "qbrouwer/detail/neighbor_index.hpp"
#include "qbrouwer/geometry.hpp"
#include "qbrouwer/maps.hpp"

namespace qbrouwer {

inline constexpr std::size_t kDefaultBudget = 10'000'000;

/// Parameters of one pass of the approximate-fixed-point construction.
struct PipelineParams {
  int dim = 1;
  double eps = 1.0;
  double eps_prime = 1.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double fp_tol = 1e-10;

  /// (eps + gamma) / R_n: how far some image sample can be from the average.
  double jung_term() const;
  /// jung_term + alpha/2 + fp_tol; a certificate's displacement never exceeds it.
  double certified_bound() const;

  /// Throws Hypothesis if eps' <= eps / R_n, InvalidArgument for any other
  /// violated constraint (gamma range, slack condition, positivity).
  void validate() const;
};

/// Grid samples Z of the ball with values f(Z), dense enough that the open
/// balls of radius alpha/2 around Z cover the ball.
class SampleGrid {
 public:
  SampleGrid(SampledMap samples, double alpha, double spacing);

  int dim() const noexcept { return samples_.dim(); }
  double alpha() const noexcept { return alpha_; }
  double spacing() const noexcept { return spacing_; }
  Eigen::Index size() const noexcept { return samples_.size(); }
  const SampledMap& samples() const noexcept { return samples_; }
  const Eigen::MatrixXd& points() const noexcept { return samples_.domain().matrix(); }
  const Eigen::MatrixXd& values() const noexcept { return samples_.values(); }

  /// Samples with |z - y| < radius (or <= when !strict), increasing index.
  std::vector<Eigen::Index> near(const Vector& y, double radius, bool strict) const;

 private:
  SampledMap samples_;
  double alpha_;
  double spacing_;
  detail::NeighborIndex index_;
};

/// Relative shrink of the grid spacing below alpha / sqrt(n).
inline constexpr double kGridSafety = 0.1;

/// Axis grid of spacing alpha/sqrt(n) * (1 - kGridSafety) clipped to the ball,
/// with the outermost shell projected onto the sphere. f is evaluated once per
/// sample. Throws ResourceError (carrying the smallest feasible alpha) when
/// the grid would hold more than `budget` points.
SampleGrid build_sample_grid(int n, double alpha, const MapFn& f, std::size_t budget = kDefaultBudget);

/// A point of the Rips complex VR(Z; alpha): a convex combination over the
/// samples within alpha/2 of the embedded point.
struct EmbeddedPoint {
  std::vector<Eigen::Index> support;
  ConvexCombination combination;
};

/// Partition of unity by normalized tents: sample z gets weight
/// alpha/2 - |z - y| when positive. Throws Covering if no sample is close
/// enough, which means the grid is defective.
EmbeddedPoint embed(const Vector& y, const SampleGrid& grid);

struct SimplicialCheck {
  bool passed = true;
  Eigen::Index first = -1;  // violating edge, when !passed
  Eigen::Index second = -1;
  double image_distance = 0.0;   // of the violating edge, or the largest seen
  std::size_t edges_checked = 0;
};

/// Verifies |f(z) - f(z')| <= bound on every edge |z - z'| <= alpha of the
/// Rips complex VR(Z; alpha). Stops at the first violating edge in
/// (lowest first, lowest second) order.
SimplicialCheck simplicial_image_check(const SampleGrid& grid, double alpha, double bound);

/// F = avg o f-bar o iota: the weighted average of f over the embedding support.
Vector averaged_map_eval(const Vector& y, const SampleGrid& grid);

struct FixedPointOptions {
  double fp_tol = 1e-10;
  std::size_t max_evaluations = 400'000;
  int coarse_per_axis = 5;
  int max_starts = 12;
};

struct FixedPointResult {
  Vector y;
  double residual = 0.0;
  std::size_t evaluations = 0;
};

/// Finds y in the ball with |F(y) - y| <= fp_tol for a continuous self-map F
/// of the ball: Newton steps with finite-difference Jacobians, falling back to
/// damped iteration y += t (F(y) - y), from a deterministic set of starts;
/// then a coarse-to-fine residual grid search. Throws NoConvergenceError with
/// the best residual when the evaluation budget runs out.
FixedPointResult find_fixed_point(const MapFn& F, int n, const FixedPointOptions& options = {});

/// An eps'-fixed point z of the sampled map with the inequality chain that
/// certifies it.
struct EpsFixedPointCertificate {
  Eigen::Index sample_index = -1;
  Vector z;
  Vector fz;
  double displacement = 0.0;       // |f(z) - z|
  double bound = 0.0;              // eps'
  double image_to_average = 0.0;   // |f(z) - F(y)| <= (eps + gamma) / R_n
  double sample_to_point = 0.0;    // |z - y| < alpha / 2
  double residual = 0.0;           // |F(y) - y| <= fp_tol
  Vector y;
};

/// Picks the support sample whose image is nearest F(y) and checks the chain
/// |f(z) - z| <= |f(z) - F(y)| + |F(y) - y| + |y - z| < eps'. Throws
/// Inconsistency if any link fails.
EpsFixedPointCertificate extract_certificate(const FixedPointResult& fixed_point, const SampleGrid& grid,
                                             const PipelineParams& params);

struct PipelineOptions {
  std::size_t budget = kDefaultBudget;  // grid samples
  double fp_tol = 1e-10;
  int max_alpha_halvings = 40;
  FixedPointOptions solver{};
};

struct PipelineRun {
  PipelineParams params;
  std::size_t samples = 0;
  int alpha_attempts = 0;  // grids built, including rejected ones
  SimplicialCheck simplicial;
  FixedPointResult fixed_point;
  EpsFixedPointCertificate certificate;
  /// |f(z) - z| recomputed by calling f again at the certified sample.
  double verified_displacement = 0.0;
};

/// Runs the whole construction for an eps-continuous self-map f of B^n and
/// returns an eps'-fixed point. Throws Hypothesis when eps' <= eps / R_n and
/// ResourceError when alpha cannot be made small enough within the budget.
PipelineRun run_pipeline(const MapFn& f, int n, double eps, double eps_prime, const PipelineOptions& options = {});

}  // namespace qbrouwer
