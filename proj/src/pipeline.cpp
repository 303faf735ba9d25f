#include "qbrouwer/pipeline.hpp"

#include <fmt/format.h>

#include <cmath>

#include "qbrouwer/detail/lattice.hpp"
#include "qbrouwer/error.hpp"

namespace qbrouwer {

double PipelineParams::jung_term() const { return (eps + gamma) / jung_radius(dim); }

double PipelineParams::certified_bound() const { return jung_term() + alpha / 2.0 + fp_tol; }

void PipelineParams::validate() const {
  const double rn = jung_radius(dim);
  if (!(eps > 0.0 && eps <= 2.0)) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("eps must lie in (0, 2], got {}", eps));
  }
  if (!(eps_prime > eps / rn)) {
    throw Error(ErrorKind::Hypothesis,
                fmt::format("eps' = {} does not exceed eps / R_{} = {}", eps_prime, dim, eps / rn));
  }
  if (!(gamma > 0.0 && gamma < rn * eps_prime - eps)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("gamma = {} outside (0, {})", gamma, rn * eps_prime - eps));
  }
  if (!(alpha > 0.0) || !(fp_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha and fp_tol must be positive");
  }
  if (!(certified_bound() < eps_prime)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("(eps + gamma)/R_n + alpha/2 + fp_tol = {} is not below eps' = {}", certified_bound(),
                            eps_prime));
  }
}

SampleGrid::SampleGrid(SampledMap samples, double alpha, double spacing)
    : samples_(std::move(samples)), alpha_(alpha), spacing_(spacing), index_(samples_.domain().matrix(), alpha / 2.0) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  }
}

std::vector<Eigen::Index> SampleGrid::near(const Vector& y, double radius, bool strict) const {
  return index_.within(y, radius, points(), strict);
}

SampleGrid build_sample_grid(int n, double alpha, const MapFn& f, std::size_t budget) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidDimension, fmt::format("dimension must be >= 1, got {}", n));
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("alpha must be positive, got {}", alpha));
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  const double spacing = alpha / root_n * (1.0 - kGridSafety);
  const double half_count = std::ceil(1.0 / spacing);
  const std::size_t per_axis = half_count < 1e15 ? 2 * static_cast<std::size_t>(half_count) + 1 : SIZE_MAX;
  if (per_axis == SIZE_MAX || detail::product_count(per_axis, n) > budget) {
    std::size_t k = 0;
    while (detail::product_count(2 * (k + 1) + 1, n) <= budget) ++k;
    const double min_alpha = k == 0 ? 0.0 : root_n / (static_cast<double>(k) * (1.0 - kGridSafety));
    throw ResourceError(fmt::format("a sample grid for alpha = {} in dimension {} exceeds the budget of {} points "
                                    "(smallest feasible alpha: {})",
                                    alpha, n, budget, min_alpha),
                        min_alpha);
  }

  std::vector<double> axis(per_axis);
  const auto half = static_cast<std::ptrdiff_t>(half_count);
  for (std::ptrdiff_t k = -half; k <= half; ++k) {
    axis[static_cast<std::size_t>(k + half)] = static_cast<double>(k) * spacing;
  }
  const double cover = spacing * root_n / 2.0;
  PointSet domain(detail::ball_lattice(n, axis, cover));
  return SampleGrid(sample_map(f, std::move(domain), cover), alpha, spacing);
}

EmbeddedPoint embed(const Vector& y, const SampleGrid& grid) {
  if (y.size() != grid.dim()) {
    throw Error(ErrorKind::InvalidDimension, "embedded point has the wrong dimension");
  }
  if (!y.allFinite() || y.norm() > 1.0 + kTolGeom) {
    throw Error(ErrorKind::Domain, fmt::format("cannot embed a point of norm {}", y.norm()));
  }
  const double half = grid.alpha() / 2.0;
  std::vector<Eigen::Index> support;
  std::vector<double> weights;
  double total = 0.0;
  for (Eigen::Index i : grid.near(y, half, true)) {
    const double w = half - (grid.points().col(i) - y).norm();
    if (w > 0.0) {
      support.push_back(i);
      weights.push_back(w);
      total += w;
    }
  }
  if (support.empty()) {
    throw Error(ErrorKind::Covering,
                fmt::format("no sample within alpha/2 = {} of the point; the grid does not cover the ball", half));
  }
  Eigen::MatrixXd pts(grid.dim(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    pts.col(static_cast<Eigen::Index>(k)) = grid.points().col(support[k]);
    weights[k] /= total;
  }
  return EmbeddedPoint{std::move(support), ConvexCombination(std::move(pts), std::move(weights))};
}

SimplicialCheck simplicial_image_check(const SampleGrid& grid, double alpha, double bound) {
  if (!(alpha > 0.0) || !(bound > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha and the image bound must be positive");
  }
  SimplicialCheck check;
  const Eigen::MatrixXd& pts = grid.points();
  const Eigen::MatrixXd& vals = grid.values();
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    for (Eigen::Index j : grid.near(pts.col(i), alpha, false)) {
      if (j <= i) continue;
      ++check.edges_checked;
      const double d = (vals.col(i) - vals.col(j)).norm();
      if (d > bound) {
        check.passed = false;
        check.first = i;
        check.second = j;
        check.image_distance = d;
        return check;
      }
      check.image_distance = std::max(check.image_distance, d);
    }
  }
  return check;
}

namespace {

// The image simplex f-bar(iota(y)) as a convex combination of sample values.
ConvexCombination image_combination(const EmbeddedPoint& e, const SampleGrid& grid) {
  Eigen::MatrixXd vals(grid.dim(), static_cast<Eigen::Index>(e.support.size()));
  for (std::size_t k = 0; k < e.support.size(); ++k) {
    vals.col(static_cast<Eigen::Index>(k)) = grid.values().col(e.support[k]);
  }
  return ConvexCombination(std::move(vals), e.combination.weights());
}

}  // namespace

Vector averaged_map_eval(const Vector& y, const SampleGrid& grid) {
  return eval_combination(image_combination(embed(y, grid), grid));
}

EpsFixedPointCertificate extract_certificate(const FixedPointResult& fixed_point, const SampleGrid& grid,
                                             const PipelineParams& params) {
  params.validate();
  if (!(fixed_point.residual <= params.fp_tol)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("fixed point residual {} exceeds fp_tol {}", fixed_point.residual, params.fp_tol));
  }
  const Vector& y = fixed_point.y;
  const EmbeddedPoint e = embed(y, grid);
  const ConvexCombination image = image_combination(e, grid);
  const Vector average = eval_combination(image);
  const NearestSupport nearest = jung_nearest(image);

  EpsFixedPointCertificate cert;
  cert.sample_index = e.support[static_cast<std::size_t>(nearest.index)];
  cert.z = grid.points().col(cert.sample_index);
  cert.fz = grid.values().col(cert.sample_index);
  cert.displacement = (cert.fz - cert.z).norm();
  cert.bound = params.eps_prime;
  cert.image_to_average = nearest.distance;
  cert.sample_to_point = (cert.z - y).norm();
  cert.residual = (average - y).norm();
  cert.y = y;

  if (cert.image_to_average > params.jung_term() + kTolGeom) {
    throw Error(ErrorKind::Inconsistency,
                fmt::format("nearest image sample is {} from the average, above (eps + gamma)/R_n = {}; the image "
                            "simplex is too wide (rerun simplicial_image_check)",
                            cert.image_to_average, params.jung_term()));
  }
  if (!(cert.sample_to_point < grid.alpha() / 2.0) || cert.residual > params.fp_tol) {
    throw Error(ErrorKind::Inconsistency, "certificate sample or residual out of range");
  }
  if (cert.displacement > params.certified_bound() + kTolGeom || !(cert.displacement < params.eps_prime)) {
    throw Error(ErrorKind::Inconsistency, fmt::format("certified displacement {} violates the bound {} < eps' = {}",
                                                      cert.displacement, params.certified_bound(), params.eps_prime));
  }
  return cert;
}

PipelineRun run_pipeline(const MapFn& f, int n, double eps, double eps_prime, const PipelineOptions& options) {
  const double rn = jung_radius(n);
  if (!(eps > 0.0 && eps <= 2.0)) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("eps must lie in (0, 2], got {}", eps));
  }
  if (!(eps_prime > eps / rn)) {
    throw Error(ErrorKind::Hypothesis,
                fmt::format("eps' = {} does not exceed eps / R_{} = {}; no eps'-fixed point is guaranteed",
                            eps_prime, n, eps / rn));
  }

  PipelineRun run;
  PipelineParams& p = run.params;
  p.dim = n;
  p.eps = eps;
  p.eps_prime = eps_prime;
  p.gamma = (rn * eps_prime - eps) / 2.0;
  p.alpha = eps;
  p.fp_tol = options.fp_tol;

  int halvings = 0;
  auto halve = [&] {
    if (++halvings > options.max_alpha_halvings) {
      throw ResourceError(fmt::format("alpha reached {} after {} halvings without satisfying the construction",
                                      p.alpha, options.max_alpha_halvings),
                          0.0);
    }
    p.alpha /= 2.0;
  };
  while (!(p.certified_bound() < eps_prime)) halve();
  p.validate();

  while (true) {
    ++run.alpha_attempts;
    SampleGrid grid = build_sample_grid(n, p.alpha, f, options.budget);
    run.simplicial = simplicial_image_check(grid, p.alpha, eps + p.gamma);
    if (!run.simplicial.passed) {
      halve();
      continue;
    }
    run.samples = static_cast<std::size_t>(grid.size());

    FixedPointOptions solver = options.solver;
    solver.fp_tol = p.fp_tol;
    const MapFn averaged = [&grid](const Vector& y) { return averaged_map_eval(y, grid); };
    run.fixed_point = find_fixed_point(averaged, n, solver);
    run.certificate = extract_certificate(run.fixed_point, grid, p);

    run.verified_displacement = (f(run.certificate.z) - run.certificate.z).norm();
    if (!(run.verified_displacement < eps_prime)) {
      throw Error(ErrorKind::Inconsistency,
                  fmt::format("re-evaluated displacement {} at the certified sample is not below eps' = {}",
                              run.verified_displacement, eps_prime));
    }
    return run;
  }
}

}  // namespace qbrouwer
