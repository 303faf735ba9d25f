#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace qbrouwer::detail {

/// Uniform bucket grid over a fixed column-wise point matrix. Cell keys are
/// kept in a sorted array, so memory is linear in the number of points no
/// matter how fine the cells are.
class NeighborIndex {
 public:
  NeighborIndex() = default;
  NeighborIndex(const Eigen::MatrixXd& points, double cell_size);

  double cell_size() const noexcept { return cell_; }

  /// Indices i with |points_i - y| <= radius (or < radius when `strict`),
  /// in increasing index order.
  std::vector<Eigen::Index> within(const Eigen::Ref<const Eigen::VectorXd>& y, double radius,
                                   const Eigen::MatrixXd& points, bool strict = false) const;

 private:
  std::int64_t key_of(const std::vector<std::int64_t>& cell) const;

  int dim_ = 0;
  double cell_ = 1.0;
  std::vector<std::int64_t> lo_;
  std::vector<std::int64_t> extent_;
  std::vector<std::int64_t> keys_;   // sorted
  std::vector<Eigen::Index> order_;  // point index for each key
};

}  // namespace qbrouwer::detail
