#include <Eigen/Dense>

#include <list>
#include <vector>

#include "qbrouwer/geometry.hpp"

namespace qbrouwer {
namespace {

// Move-to-front miniball. Recursion depth is bounded by dim + 1 because every
// level adds one point to the support stack.
class MinBallSolver {
 public:
  explicit MinBallSolver(const Eigen::MatrixXd& points)
      : points_(points), dim_(static_cast<int>(points.rows())), center_(Vector::Zero(points.rows())) {
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      order_.push_back(i);
    }
  }

  Ball solve() {
    move_to_front(order_.end());
    double r2 = 0.0;
    for (Eigen::Index i = 0; i < points_.cols(); ++i) {
      r2 = std::max(r2, (points_.col(i) - center_).squaredNorm());
    }
    return Ball{center_, std::sqrt(r2)};
  }

 private:
  bool outside(Eigen::Index i) const {
    if (radius2_ < 0.0) {
      return true;
    }
    const double d2 = (points_.col(i) - center_).squaredNorm();
    return d2 > radius2_ + 1e-13 * std::max(1.0, radius2_);
  }

  // Smallest ball with every support point on its boundary: the circumcenter
  // within the affine hull of the support.
  void ball_from_support() {
    if (support_.empty()) {
      radius2_ = -1.0;
      return;
    }
    const Vector origin = points_.col(support_.front());
    const auto k = static_cast<Eigen::Index>(support_.size()) - 1;
    if (k == 0) {
      center_ = origin;
      radius2_ = 0.0;
      return;
    }
    Eigen::MatrixXd edges(dim_, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      edges.col(j) = points_.col(support_[static_cast<std::size_t>(j + 1)]) - origin;
    }
    const Eigen::MatrixXd gram = edges.transpose() * edges;
    const Eigen::VectorXd rhs = 0.5 * gram.diagonal();
    const Eigen::VectorXd coeffs = gram.completeOrthogonalDecomposition().solve(rhs);
    center_ = origin + edges * coeffs;
    radius2_ = 0.0;
    for (Eigen::Index s : support_) {
      radius2_ = std::max(radius2_, (points_.col(s) - center_).squaredNorm());
    }
  }

  void move_to_front(std::list<Eigen::Index>::iterator end) {
    ball_from_support();
    if (static_cast<int>(support_.size()) == dim_ + 1) {
      return;
    }
    for (auto it = order_.begin(); it != end;) {
      auto next = std::next(it);
      if (outside(*it)) {
        support_.push_back(*it);
        move_to_front(it);
        support_.pop_back();
        order_.splice(order_.begin(), order_, it);
      }
      it = next;
    }
  }

  const Eigen::MatrixXd& points_;
  int dim_;
  std::list<Eigen::Index> order_;
  std::vector<Eigen::Index> support_;
  Vector center_;
  double radius2_ = -1.0;
};

}  // namespace

Ball min_enclosing_ball(const PointSet& points) { return MinBallSolver(points.matrix()).solve(); }

}  // namespace qbrouwer
