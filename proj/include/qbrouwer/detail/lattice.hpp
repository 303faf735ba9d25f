#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>

namespace qbrouwer::detail {

/// Number of points of the full product grid, saturating at SIZE_MAX.
std::size_t product_count(std::size_t per_axis, int dim);

/// Product grid axis^dim restricted to the closed unit ball. Grid points
/// outside the ball but within `shell` of the sphere are projected radially
/// onto it, so the projected set covers the ball at least as well as the
/// unclipped grid does (projection onto a convex set is nonexpansive).
/// Points are emitted column-wise in odometer order, first axis fastest.
/// With `clip` false the full product grid is returned unchanged.
Eigen::MatrixXd ball_lattice(int dim, std::span<const double> axis, double shell, bool clip = true);

}  // namespace qbrouwer::detail
