#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qbrouwer/detail/lattice.hpp"
#include "qbrouwer/error.hpp"
#include "qbrouwer/pipeline.hpp"

namespace qbrouwer {
namespace {

Vector project_to_ball(Vector y) {
  const double norm = y.norm();
  if (norm > 1.0) y /= norm;
  return y;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (count - 1);
  }
  return out;
}

class FixedPointSearch {
 public:
  FixedPointSearch(const MapFn& map, int n, const FixedPointOptions& options)
      : map_(map), n_(n), options_(options), best_y_(Vector::Zero(n)) {}

  FixedPointResult run() {
    if (local_solve(Vector::Zero(n_), 100)) return result();

    struct Start {
      Vector y;
      double residual;
    };
    std::vector<Start> starts;
    const std::vector<double> axis = linspace(-1.0, 1.0, std::max(options_.coarse_per_axis, 2));
    const Eigen::MatrixXd coarse = detail::ball_lattice(n_, axis, 0.0);
    for (Eigen::Index i = 0; i < coarse.cols(); ++i) {
      const Vector y = coarse.col(i);
      starts.push_back({y, residual_vector(y).norm()});
      if (converged()) return result();
    }
    std::stable_sort(starts.begin(), starts.end(),
                     [](const Start& a, const Start& b) { return a.residual < b.residual; });
    const std::size_t limit = std::min<std::size_t>(starts.size(), static_cast<std::size_t>(options_.max_starts));
    for (std::size_t s = 0; s < limit; ++s) {
      if (local_solve(starts[s].y, 100)) return result();
    }

    // Coarse-to-fine: shrink a box around the best point found so far.
    double half_width = 1.0;
    while (half_width > 1e-15) {
      const Vector center = best_y_;
      const std::vector<double> offsets = linspace(-half_width, half_width, 9);
      std::vector<std::size_t> idx(static_cast<std::size_t>(n_), 0);
      while (true) {
        Vector y(n_);
        for (int d = 0; d < n_; ++d) y(d) = center(d) + offsets[idx[static_cast<std::size_t>(d)]];
        if (y.norm() <= 1.0) {
          residual_vector(y);
          if (converged()) return result();
        }
        int d = 0;
        while (d < n_ && idx[static_cast<std::size_t>(d)] + 1 == offsets.size()) {
          idx[static_cast<std::size_t>(d)] = 0;
          ++d;
        }
        if (d == n_) break;
        ++idx[static_cast<std::size_t>(d)];
      }
      if (local_solve(best_y_, 30)) return result();
      half_width /= 2.0;
    }
    throw NoConvergenceError(fmt::format("fixed-point search stalled with residual {}", best_residual_),
                             best_residual_);
  }

 private:
  bool converged() const { return best_residual_ <= options_.fp_tol; }

  FixedPointResult result() const { return {best_y_, best_residual_, evaluations_}; }

  Vector residual_vector(const Vector& y) {
    if (evaluations_ >= options_.max_evaluations) {
      throw NoConvergenceError(fmt::format("fixed-point search used {} evaluations; best residual {}",
                                           evaluations_, best_residual_),
                               best_residual_);
    }
    ++evaluations_;
    Vector r = map_(y) - y;
    const double norm = r.norm();
    if (norm < best_residual_) {
      best_residual_ = norm;
      best_y_ = y;
    }
    return r;
  }

  // Jacobian of G(y) = F(y) - y by one-sided differences that stay in the ball.
  Eigen::MatrixXd jacobian(const Vector& y, const Vector& g) {
    constexpr double h = 1e-7;
    Eigen::MatrixXd jac(n_, n_);
    for (int k = 0; k < n_; ++k) {
      Vector step = Vector::Zero(n_);
      step(k) = h;
      if ((y + step).norm() <= 1.0) {
        jac.col(k) = (residual_vector(y + step) - g) / h;
      } else {
        jac.col(k) = (g - residual_vector(y - step)) / h;
      }
    }
    return jac;
  }

  bool local_solve(const Vector& start, int max_iterations) {
    Vector y = project_to_ball(start);
    Vector g = residual_vector(y);
    double norm = g.norm();
    double damping = 0.5;
    for (int iter = 0; iter < max_iterations; ++iter) {
      if (norm <= options_.fp_tol) return true;
      bool accepted = false;

      const Vector newton = jacobian(y, g).colPivHouseholderQr().solve(-g);
      if (newton.allFinite()) {
        double lambda = 1.0;
        for (int k = 0; k < 12 && !accepted; ++k, lambda /= 2.0) {
          const Vector trial = project_to_ball(y + lambda * newton);
          const Vector gt = residual_vector(trial);
          if (gt.norm() < (1.0 - 1e-4 * lambda) * norm) {
            y = trial;
            g = gt;
            norm = gt.norm();
            accepted = true;
          }
        }
      }
      for (int k = 0; k < 10 && !accepted; ++k) {
        const Vector trial = project_to_ball(y + damping * g);
        const Vector gt = residual_vector(trial);
        if (gt.norm() < norm) {
          y = trial;
          g = gt;
          norm = gt.norm();
          accepted = true;
          damping = std::min(1.0, 2.0 * damping);
        } else {
          damping /= 2.0;
        }
      }
      if (!accepted) return false;
    }
    return norm <= options_.fp_tol;
  }

  const MapFn& map_;
  int n_;
  FixedPointOptions options_;
  std::size_t evaluations_ = 0;
  Vector best_y_;
  double best_residual_ = std::numeric_limits<double>::infinity();
};

}  // namespace

FixedPointResult find_fixed_point(const MapFn& F, int n, const FixedPointOptions& options) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidDimension, fmt::format("dimension must be >= 1, got {}", n));
  }
  if (!(options.fp_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "fp_tol must be positive");
  }
  return FixedPointSearch(F, n, options).run();
}

}  // namespace qbrouwer
