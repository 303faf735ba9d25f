#include "qbrouwer/geometry.hpp"

#include <Eigen/QR>
#include <fmt/format.h>

#include <cmath>
#include <mutex>
#include <numeric>

#include "qbrouwer/error.hpp"

namespace qbrouwer {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidCombination: return "invalid-combination";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Covering: return "covering-violation";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::Inconsistency: return "internal-inconsistency";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

double jung_radius(int n) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidDimension, fmt::format("dimension must be >= 1, got {}", n));
  }
  return std::sqrt(2.0 * (n + 1) / n);
}

struct PointSet::DiameterCache {
  std::once_flag once;
  double value = 0.0;
};

PointSet::PointSet(Eigen::MatrixXd columns)
    : points_(std::move(columns)), cache_(std::make_shared<DiameterCache>()) {
  if (points_.rows() < 1) {
    throw Error(ErrorKind::InvalidDimension, "point set dimension must be >= 1");
  }
  if (points_.cols() < 1) {
    throw Error(ErrorKind::InvalidArgument, "point set must be nonempty");
  }
  if (!points_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "point coordinates must be finite");
  }
}

PointSet PointSet::from_points(std::span<const Vector> points) {
  if (points.empty()) {
    throw Error(ErrorKind::InvalidArgument, "point set must be nonempty");
  }
  const Eigen::Index dim = points.front().size();
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw Error(ErrorKind::InvalidDimension, "points of a point set must share one dimension");
    }
    m.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  return PointSet(std::move(m));
}

double PointSet::diameter() const {
  std::call_once(cache_->once, [this] {
    double best = 0.0;
    for (Eigen::Index i = 0; i < points_.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < points_.cols(); ++j) {
        best = std::max(best, (points_.col(i) - points_.col(j)).squaredNorm());
      }
    }
    cache_->value = std::sqrt(best);
  });
  return cache_->value;
}

double diameter(const PointSet& points) { return points.diameter(); }

PointSet regular_simplex_vertices(int n) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidDimension, fmt::format("dimension must be >= 1, got {}", n));
  }
  // Standard basis of R^{n+1}, centered. Any n of the centered vectors are
  // independent, so the QR factor of the first n spans the centered hyperplane.
  Eigen::MatrixXd centered = Eigen::MatrixXd::Identity(n + 1, n + 1);
  centered.array() -= 1.0 / (n + 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(centered.leftCols(n));
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n + 1, n);

  Eigen::MatrixXd vertices = basis.transpose() * centered;
  vertices.colwise().normalize();
  // Fix the orientation so the first vertex has a negative first coordinate.
  if (vertices(0, 0) > 0.0) {
    vertices.row(0) *= -1.0;
  }
  return PointSet(std::move(vertices));
}

ConvexCombination::ConvexCombination(Eigen::MatrixXd points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.cols() != static_cast<Eigen::Index>(weights_.size())) {
    throw Error(ErrorKind::InvalidCombination,
                fmt::format("{} points but {} weights", points_.cols(), weights_.size()));
  }
  if (weights_.empty()) {
    throw Error(ErrorKind::InvalidCombination, "convex combination needs at least one point");
  }
  if (points_.rows() < 1 || !points_.allFinite()) {
    throw Error(ErrorKind::InvalidCombination, "combination points must be finite with dim >= 1");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InvalidCombination, fmt::format("weight {} is not strictly positive", w));
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kTolWeights) {
    throw Error(ErrorKind::InvalidCombination, fmt::format("weights sum to {:.17g}, expected 1", sum));
  }
}

ConvexCombination::ConvexCombination(const PointSet& points, std::vector<double> weights)
    : ConvexCombination(points.matrix(), std::move(weights)) {}

Vector eval_combination(const ConvexCombination& c) {
  const Eigen::Map<const Eigen::VectorXd> w(c.weights().data(), c.size());
  return c.points() * w;
}

NearestSupport jung_nearest(const ConvexCombination& c) {
  const Vector y = eval_combination(c);
  NearestSupport best{0, (c.points().col(0) - y).norm()};
  for (Eigen::Index i = 1; i < c.size(); ++i) {
    const double d = (c.points().col(i) - y).norm();
    if (d < best.distance) {
      best = {i, d};
    }
  }
  return best;
}

}  // namespace qbrouwer
