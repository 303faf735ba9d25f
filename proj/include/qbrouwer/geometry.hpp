#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace qbrouwer {

/// A point of R^n. Coordinates are unitless Euclidean coordinates.
using Vector = Eigen::VectorXd;

inline constexpr double kTolGeom = 1e-9;
inline constexpr double kTolWeights = 1e-12;

/// Diameter of the regular n-simplex inscribed in the unit sphere of R^n,
/// sqrt(2(n+1)/n). Jung's theorem bounds the circumradius of any set of
/// diameter d by d / jung_radius(n).
double jung_radius(int n);

/// A nonempty finite configuration of points of equal dimension, stored
/// column-wise. The diameter is computed on first use and shared between
/// copies; the points themselves never change after construction.
class PointSet {
 public:
  /// `columns` is dim x count; throws on empty input or non-finite entries.
  explicit PointSet(Eigen::MatrixXd columns);
  static PointSet from_points(std::span<const Vector> points);

  int dim() const noexcept { return static_cast<int>(points_.rows()); }
  Eigen::Index size() const noexcept { return points_.cols(); }
  const Eigen::MatrixXd& matrix() const noexcept { return points_; }
  Vector point(Eigen::Index i) const { return points_.col(i); }

  /// Maximum pairwise Euclidean distance; 0 for a singleton.
  double diameter() const;

 private:
  struct DiameterCache;

  Eigen::MatrixXd points_;
  std::shared_ptr<DiameterCache> cache_;
};

double diameter(const PointSet& points);

/// Closed ball {z : |z - center| <= radius}.
struct Ball {
  Vector center;
  double radius = 0.0;

  bool contains(const Eigen::Ref<const Vector>& p, double tol = kTolGeom) const {
    return (p - center).norm() <= radius + tol;
  }
};

/// n+1 unit vectors of R^n with pairwise inner product -1/n.
/// For n = 1 the order is {(-1), (+1)}.
PointSet regular_simplex_vertices(int n);

/// Smallest ball containing every point (move-to-front Welzl recursion,
/// processing points in input order).
Ball min_enclosing_ball(const PointSet& points);

/// Strictly positive weights summing to one over a list of points.
class ConvexCombination {
 public:
  ConvexCombination(Eigen::MatrixXd points, std::vector<double> weights);
  ConvexCombination(const PointSet& points, std::vector<double> weights);

  int dim() const noexcept { return static_cast<int>(points_.rows()); }
  Eigen::Index size() const noexcept { return points_.cols(); }
  const Eigen::MatrixXd& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  Eigen::MatrixXd points_;
  std::vector<double> weights_;
};

/// The Euclidean point sum_i weight_i * point_i.
Vector eval_combination(const ConvexCombination& c);

struct NearestSupport {
  Eigen::Index index = 0;
  double distance = 0.0;
};

/// Support point nearest to eval_combination(c) (lowest index on ties).
/// Jung's theorem guarantees distance <= diam(support) / jung_radius(dim).
NearestSupport jung_nearest(const ConvexCombination& c);

}  // namespace qbrouwer
