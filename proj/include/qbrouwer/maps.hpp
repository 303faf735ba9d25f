#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "qbrouwer/detail/neighbor_index.hpp"
#include "qbrouwer/geometry.hpp"

namespace qbrouwer {

/// A self-map of the unit ball given as a callable.
using MapFn = std::function<Vector(const Vector&)>;

/// The one-dimensional counterexample: eps/2 on [-1, 0], -eps/2 on (0, 1].
class StepMap1D {
 public:
  explicit StepMap1D(double eps);

  double eps() const noexcept { return eps_; }
  double operator()(double x) const;
  Vector operator()(const Vector& x) const;

 private:
  double eps_;
};

enum class TieBreak { LowestIndex };

/// Sends the Voronoi cell of the simplex vertex x_i to -(eps / R_n) x_i.
/// Cells are made disjoint by the tie-break rule, so every point of the ball
/// has exactly one image. For n = 1 the vertices are ordered {-1, +1}, which
/// puts the origin in the cell of -1 and makes the map agree with StepMap1D.
class ExtremalMap {
 public:
  ExtremalMap(int dim, double eps, TieBreak tie_break = TieBreak::LowestIndex);

  int dim() const noexcept { return dim_; }
  double eps() const noexcept { return eps_; }
  TieBreak tie_break() const noexcept { return tie_break_; }
  const PointSet& vertices() const noexcept { return vertices_; }
  /// Norm of every image point, eps / R_n.
  double image_radius() const noexcept { return image_radius_; }
  /// The n+1 image points -(eps / R_n) x_i.
  const PointSet& image_points() const noexcept { return images_; }

  Eigen::Index voronoi_index(const Vector& x) const;
  Vector operator()(const Vector& x) const;

 private:
  int dim_;
  double eps_;
  TieBreak tie_break_;
  PointSet vertices_;
  double image_radius_;
  PointSet images_;
};

/// A finite sample Z of the ball together with the values f(Z).
/// `covering_radius` is caller metadata: every point of the ball is claimed to
/// lie within it of some sample. `probe_covering` checks the claim.
class SampledMap {
 public:
  SampledMap(PointSet domain, Eigen::MatrixXd values, double covering_radius,
             std::optional<double> eps = std::nullopt);

  int dim() const noexcept { return domain_.dim(); }
  Eigen::Index size() const noexcept { return domain_.size(); }
  const PointSet& domain() const noexcept { return domain_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  double covering_radius() const noexcept { return covering_radius_; }
  const std::optional<double>& eps() const noexcept { return eps_; }

  /// Piecewise-constant extension to the whole ball: the value at the nearest
  /// sample, lowest index on ties.
  Vector nearest_value(const Vector& x) const;

 private:
  PointSet domain_;
  Eigen::MatrixXd values_;
  double covering_radius_;
  std::optional<double> eps_;
  std::shared_ptr<const detail::NeighborIndex> index_;
};

/// Evaluates `f` once per domain point.
SampledMap sample_map(const MapFn& f, PointSet domain, double covering_radius,
                      std::optional<double> eps = std::nullopt);

/// Largest distance from `probes` uniformly random points of the ball to the
/// nearest sample. The covering claim holds on the probes iff the result is
/// at most covering_radius().
double probe_covering(const SampledMap& map, int probes, std::uint64_t seed);

MapFn as_map(const StepMap1D& m);
MapFn as_map(const ExtremalMap& m);
MapFn as_map(const SampledMap& m);

double image_diameter(const StepMap1D& m);
double image_diameter(const ExtremalMap& m);
double image_diameter(const SampledMap& m);

struct ModulusEstimate {
  double scale = 0.0;
  double value = 0.0;
};

/// max_z diam{ f(z') : z' in Z, |z' - z| <= r }. Estimates the modulus of
/// discontinuity of f restricted to Z using closed balls of radius r.
ModulusEstimate modulus_estimate(const SampledMap& map, double r);

struct DiscontinuityWitness1D {
  double y_right = 0.0;  // f(y_right) - y_right > eps'
  double y_left = 0.0;   // y_left - f(y_left) > eps'
  double image_gap = 0.0;  // f(y_right) - f(y_left)

  double separation() const { return std::abs(y_left - y_right); }
};

struct WitnessSearch {
  enum class Outcome {
    Witness,     // no eps'-fixed sample; adjacent samples move in opposite directions
    FixedPoint,  // some sample is an eps'-fixed point
    Inconclusive,  // one side empty, or the sign change is wider than the resolution
  };

  Outcome outcome = Outcome::Inconclusive;
  std::optional<DiscontinuityWitness1D> witness;
  std::optional<double> fixed_point;
  std::optional<double> fixed_displacement;
};

/// Splits the samples of a one-dimensional map into points moved right by
/// more than eps' and points moved left by more than eps', and returns the
/// first adjacent pair (by position) that switches sides within `resolution`.
/// If any sample is an eps'-fixed point it is reported instead.
WitnessSearch discontinuity_witness_1d(const SampledMap& map, double eps_prime, double resolution);

}  // namespace qbrouwer
