#include "qbrouwer/detail/neighbor_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qbrouwer/error.hpp"

namespace qbrouwer::detail {

NeighborIndex::NeighborIndex(const Eigen::MatrixXd& points, double cell_size)
    : dim_(static_cast<int>(points.rows())), cell_(cell_size) {
  if (!(cell_size > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "neighbor index cell size must be positive");
  }
  const Eigen::Index m = points.cols();
  std::vector<std::int64_t> cells(static_cast<std::size_t>(m) * dim_);
  lo_.assign(dim_, 0);
  std::vector<std::int64_t> hi(dim_, 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int d = 0; d < dim_; ++d) {
      const auto c = static_cast<std::int64_t>(std::floor(points(d, i) / cell_));
      cells[static_cast<std::size_t>(i) * dim_ + d] = c;
      if (i == 0 || c < lo_[d]) lo_[d] = c;
      if (i == 0 || c > hi[d]) hi[d] = c;
    }
  }
  extent_.resize(dim_);
  for (int d = 0; d < dim_; ++d) {
    extent_[d] = hi[d] - lo_[d] + 1;
  }

  std::vector<std::int64_t> raw(static_cast<std::size_t>(m));
  std::vector<std::int64_t> cell(dim_);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int d = 0; d < dim_; ++d) cell[d] = cells[static_cast<std::size_t>(i) * dim_ + d];
    raw[static_cast<std::size_t>(i)] = key_of(cell);
  }
  order_.resize(static_cast<std::size_t>(m));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  std::stable_sort(order_.begin(), order_.end(), [&](Eigen::Index a, Eigen::Index b) {
    return raw[static_cast<std::size_t>(a)] < raw[static_cast<std::size_t>(b)];
  });
  keys_.resize(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) {
    keys_[k] = raw[static_cast<std::size_t>(order_[k])];
  }
}

std::int64_t NeighborIndex::key_of(const std::vector<std::int64_t>& cell) const {
  std::int64_t key = 0;
  for (int d = 0; d < dim_; ++d) {
    const std::int64_t local = cell[d] - lo_[d];
    if (local < 0 || local >= extent_[d]) {
      return -1;
    }
    key = key * extent_[d] + local;
  }
  return key;
}

std::vector<Eigen::Index> NeighborIndex::within(const Eigen::Ref<const Eigen::VectorXd>& y, double radius,
                                                const Eigen::MatrixXd& points, bool strict) const {
  std::vector<Eigen::Index> found;
  if (keys_.empty()) {
    return found;
  }
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
  std::vector<std::int64_t> base(dim_);
  for (int d = 0; d < dim_; ++d) {
    base[d] = static_cast<std::int64_t>(std::floor(y(d) / cell_));
  }
  const double r2 = radius * radius;
  std::vector<std::int64_t> offset(dim_, -reach);
  std::vector<std::int64_t> cell(dim_);
  while (true) {
    for (int d = 0; d < dim_; ++d) cell[d] = base[d] + offset[d];
    const std::int64_t key = key_of(cell);
    if (key >= 0) {
      auto [first, last] = std::equal_range(keys_.begin(), keys_.end(), key);
      for (auto it = first; it != last; ++it) {
        const Eigen::Index i = order_[static_cast<std::size_t>(it - keys_.begin())];
        const double d2 = (points.col(i) - y).squaredNorm();
        if (strict ? d2 < r2 : d2 <= r2) {
          found.push_back(i);
        }
      }
    }
    int d = 0;
    while (d < dim_ && offset[d] == reach) {
      offset[d] = -reach;
      ++d;
    }
    if (d == dim_) break;
    ++offset[d];
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace qbrouwer::detail
