#include "qbrouwer/detail/lattice.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qbrouwer::detail {

std::size_t product_count(std::size_t per_axis, int dim) {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) {
    if (per_axis != 0 && total > std::numeric_limits<std::size_t>::max() / per_axis) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= per_axis;
  }
  return total;
}

Eigen::MatrixXd ball_lattice(int dim, std::span<const double> axis, double shell, bool clip) {
  const std::size_t k = axis.size();
  std::vector<double> columns;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  Eigen::VectorXd p(dim);
  const double outer = 1.0 + shell;
  while (true) {
    for (int d = 0; d < dim; ++d) p(d) = axis[idx[static_cast<std::size_t>(d)]];
    const double norm = p.norm();
    if (!clip || norm <= 1.0) {
      columns.insert(columns.end(), p.data(), p.data() + dim);
    } else if (norm <= outer) {
      for (int d = 0; d < dim; ++d) columns.push_back(p(d) / norm);
    }
    int d = 0;
    while (d < dim && idx[static_cast<std::size_t>(d)] + 1 == k) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == dim) break;
    ++idx[static_cast<std::size_t>(d)];
  }
  const auto count = static_cast<Eigen::Index>(columns.size() / static_cast<std::size_t>(dim));
  return Eigen::Map<const Eigen::MatrixXd>(columns.data(), dim, count);
}

}  // namespace qbrouwer::detail
