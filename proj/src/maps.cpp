#include "qbrouwer/maps.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "qbrouwer/detail/random.hpp"
#include "qbrouwer/error.hpp"

namespace qbrouwer {
namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 2.0)) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("eps must lie in (0, 2], got {}", eps));
  }
}

void check_in_ball(const Vector& x, int dim) {
  if (x.size() != dim) {
    throw Error(ErrorKind::InvalidDimension, fmt::format("expected a point of R^{}, got R^{}", dim, x.size()));
  }
  if (!x.allFinite() || x.norm() > 1.0 + kTolGeom) {
    throw Error(ErrorKind::Domain, fmt::format("point of norm {} is outside the unit ball", x.norm()));
  }
}

}  // namespace

StepMap1D::StepMap1D(double eps) : eps_(eps) { check_eps(eps); }

double StepMap1D::operator()(double x) const {
  if (!(std::abs(x) <= 1.0 + kTolGeom)) {
    throw Error(ErrorKind::Domain, fmt::format("step map evaluated at {} outside [-1, 1]", x));
  }
  return x <= 0.0 ? eps_ / 2.0 : -eps_ / 2.0;
}

Vector StepMap1D::operator()(const Vector& x) const {
  check_in_ball(x, 1);
  return Vector::Constant(1, (*this)(x(0)));
}

ExtremalMap::ExtremalMap(int dim, double eps, TieBreak tie_break)
    : dim_(dim),
      eps_(eps),
      tie_break_(tie_break),
      vertices_(regular_simplex_vertices(dim)),
      image_radius_(eps / jung_radius(dim)),
      images_(-image_radius_ * vertices_.matrix()) {
  check_eps(eps);
}

Eigen::Index ExtremalMap::voronoi_index(const Vector& x) const {
  check_in_ball(x, dim_);
  // Vertices are unit vectors, so the nearest one has the largest inner product.
  const Eigen::VectorXd dots = vertices_.matrix().transpose() * x;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < dots.size(); ++i) {
    if (dots(i) > dots(best)) best = i;
  }
  return best;
}

Vector ExtremalMap::operator()(const Vector& x) const { return images_.matrix().col(voronoi_index(x)); }

SampledMap::SampledMap(PointSet domain, Eigen::MatrixXd values, double covering_radius, std::optional<double> eps)
    : domain_(std::move(domain)), values_(std::move(values)), covering_radius_(covering_radius), eps_(eps) {
  if (values_.rows() != domain_.dim() || values_.cols() != domain_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("values are {}x{} but the domain is {}x{}", values_.rows(), values_.cols(),
                            domain_.dim(), domain_.size()));
  }
  if (!values_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "sampled values must be finite");
  }
  if (!(covering_radius_ >= 0.0) || !std::isfinite(covering_radius_)) {
    throw Error(ErrorKind::InvalidArgument, "covering radius must be a finite nonnegative number");
  }
  if (eps_) check_eps(*eps_);
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (domain_.matrix().col(i).norm() > 1.0 + kTolGeom || values_.col(i).norm() > 1.0 + kTolGeom) {
      throw Error(ErrorKind::Domain, fmt::format("sample {} or its value lies outside the unit ball", i));
    }
  }
  if (covering_radius_ > 0.0) {
    index_ = std::make_shared<detail::NeighborIndex>(domain_.matrix(), covering_radius_);
  }
}

Vector SampledMap::nearest_value(const Vector& x) const {
  check_in_ball(x, dim());
  const Eigen::MatrixXd& pts = domain_.matrix();
  std::vector<Eigen::Index> candidates;
  if (index_) {
    candidates = index_->within(x, covering_radius_, pts);
  }
  auto pick = [&](auto&& range) {
    Eigen::Index best = -1;
    double best_d2 = 0.0;
    for (Eigen::Index i : range) {
      const double d2 = (pts.col(i) - x).squaredNorm();
      if (best < 0 || d2 < best_d2) {
        best = i;
        best_d2 = d2;
      }
    }
    return best;
  };
  Eigen::Index best = pick(candidates);
  if (best < 0) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(size()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    best = pick(all);
  }
  return values_.col(best);
}

SampledMap sample_map(const MapFn& f, PointSet domain, double covering_radius, std::optional<double> eps) {
  Eigen::MatrixXd values(domain.dim(), domain.size());
  for (Eigen::Index i = 0; i < domain.size(); ++i) {
    const Vector v = f(domain.point(i));
    if (v.size() != domain.dim()) {
      throw Error(ErrorKind::InvalidDimension, "map returned a value of the wrong dimension");
    }
    values.col(i) = v;
  }
  return SampledMap(std::move(domain), std::move(values), covering_radius, eps);
}

double probe_covering(const SampledMap& map, int probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd& pts = map.domain().matrix();
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Vector y = detail::random_in_ball(map.dim(), rng);
    const double d2 = (pts.colwise() - y).colwise().squaredNorm().minCoeff();
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

MapFn as_map(const StepMap1D& m) {
  return [m](const Vector& x) { return m(x); };
}

MapFn as_map(const ExtremalMap& m) {
  return [m](const Vector& x) { return m(x); };
}

MapFn as_map(const SampledMap& m) {
  return [m](const Vector& x) { return m.nearest_value(x); };
}

double image_diameter(const StepMap1D& m) { return m.eps() / 2.0 - (-m.eps() / 2.0); }

double image_diameter(const ExtremalMap& m) { return m.image_points().diameter(); }

double image_diameter(const SampledMap& m) { return PointSet(m.values()).diameter(); }

namespace {

// Groups identical value columns. Maps with a finite image (the step and
// extremal maps) collapse to a handful of ids, which makes window diameters
// cheap to compute exactly.
struct DistinctValues {
  std::vector<std::size_t> id;  // per sample
  std::vector<Eigen::Index> representative;
};

DistinctValues distinct_values(const Eigen::MatrixXd& values) {
  const Eigen::Index m = values.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index d = 0; d < values.rows(); ++d) {
      if (values(d, a) != values(d, b)) return values(d, a) < values(d, b);
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);
  DistinctValues out;
  out.id.resize(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || less(order[k - 1], order[k])) {
      out.representative.push_back(order[k]);
    }
    out.id[static_cast<std::size_t>(order[k])] = out.representative.size() - 1;
  }
  return out;
}

}  // namespace

ModulusEstimate modulus_estimate(const SampledMap& map, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::Domain, fmt::format("modulus scale must be positive, got {}", r));
  }
  const Eigen::MatrixXd& pts = map.domain().matrix();
  const Eigen::MatrixXd& vals = map.values();
  const detail::NeighborIndex index(pts, r);
  const DistinctValues distinct = distinct_values(vals);
  const std::size_t kinds = distinct.representative.size();

  ModulusEstimate est{r, 0.0};
  if (kinds <= 64) {
    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kinds), static_cast<Eigen::Index>(kinds));
    for (std::size_t a = 0; a < kinds; ++a) {
      for (std::size_t b = a + 1; b < kinds; ++b) {
        const double d = (vals.col(distinct.representative[a]) - vals.col(distinct.representative[b])).norm();
        table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = d;
        table(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = d;
      }
    }
    const double ceiling = table.maxCoeff();
    auto pair_max = [&](std::uint64_t mask) {
      double best = 0.0;
      for (std::uint64_t a = mask; a != 0; a &= a - 1) {
        const int ia = std::countr_zero(a);
        for (std::uint64_t b = a & (a - 1); b != 0; b &= b - 1) best = std::max(best, table(ia, std::countr_zero(b)));
      }
      return best;
    };

    // Ids present per cell of side r. A window of radius r around a point
    // only reaches the 3^n cells around its own, so their union bounds it.
    const int n = map.dim();
    const Eigen::VectorXd lo = pts.rowwise().minCoeff();
    const Eigen::VectorXd hi = pts.rowwise().maxCoeff();
    std::vector<std::int64_t> extent(static_cast<std::size_t>(n));
    std::vector<std::int64_t> stride(static_cast<std::size_t>(n));
    std::int64_t total = 1;
    for (int d = 0; d < n; ++d) {
      // Two spare layers so every neighbor of an occupied cell has a key.
      extent[static_cast<std::size_t>(d)] = static_cast<std::int64_t>(std::floor((hi(d) - lo(d)) / r)) + 3;
      stride[static_cast<std::size_t>(d)] = total;
      total *= extent[static_cast<std::size_t>(d)];
    }
    auto cell_of = [&](Eigen::Index i) {
      std::int64_t key = 0;
      for (int d = 0; d < n; ++d) {
        key += (static_cast<std::int64_t>(std::floor((pts(d, i) - lo(d)) / r)) + 1) * stride[static_cast<std::size_t>(d)];
      }
      return key;
    };
    std::unordered_map<std::int64_t, std::uint64_t> cells;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) cells[cell_of(i)] |= std::uint64_t{1} << distinct.id[static_cast<std::size_t>(i)];
    std::unordered_map<std::int64_t, double> cell_bound;
    auto bound_for = [&](std::int64_t cell) {
      auto [it, inserted] = cell_bound.try_emplace(cell, 0.0);
      if (!inserted) return it->second;
      std::uint64_t mask = 0;
      std::vector<int> offset(static_cast<std::size_t>(n), -1);
      while (true) {
        std::int64_t probe = cell;
        for (int d = 0; d < n; ++d) probe += offset[static_cast<std::size_t>(d)] * stride[static_cast<std::size_t>(d)];
        if (auto found = cells.find(probe); found != cells.end()) mask |= found->second;
        int d = 0;
        while (d < n && offset[static_cast<std::size_t>(d)] == 1) offset[static_cast<std::size_t>(d++)] = -1;
        if (d == n) break;
        ++offset[static_cast<std::size_t>(d)];
      }
      it->second = pair_max(mask);
      return it->second;
    };

    std::unordered_map<std::uint64_t, double> memo;
    for (Eigen::Index i = 0; i < pts.cols() && est.value < ceiling; ++i) {
      if (bound_for(cell_of(i)) <= est.value) continue;
      std::uint64_t mask = 0;
      for (Eigen::Index j : index.within(pts.col(i), r, pts)) {
        mask |= std::uint64_t{1} << distinct.id[static_cast<std::size_t>(j)];
      }
      auto [it, inserted] = memo.try_emplace(mask, 0.0);
      if (inserted) it->second = pair_max(mask);
      est.value = std::max(est.value, it->second);
    }
    return est;
  }

  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const std::vector<Eigen::Index> window = index.within(pts.col(i), r, pts);
    for (std::size_t a = 0; a < window.size(); ++a) {
      for (std::size_t b = a + 1; b < window.size(); ++b) {
        est.value = std::max(est.value, (vals.col(window[a]) - vals.col(window[b])).norm());
      }
    }
  }
  return est;
}

WitnessSearch discontinuity_witness_1d(const SampledMap& map, double eps_prime, double resolution) {
  if (map.dim() != 1) {
    throw Error(ErrorKind::InvalidDimension, "the witness search needs a one-dimensional map");
  }
  if (!(eps_prime > 0.0) || !(resolution > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "eps' and the resolution must be positive");
  }
  const Eigen::MatrixXd& xs = map.domain().matrix();
  const Eigen::MatrixXd& fx = map.values();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(map.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return xs(0, a) < xs(0, b); });

  WitnessSearch result;
  for (Eigen::Index i : order) {
    const double displacement = std::abs(fx(0, i) - xs(0, i));
    if (displacement <= eps_prime) {
      result.outcome = WitnessSearch::Outcome::FixedPoint;
      result.fixed_point = xs(0, i);
      result.fixed_displacement = displacement;
      return result;
    }
  }

  // With no eps'-fixed sample every sample moves right (f(x) - x > eps') or left.
  auto moves_right = [&](Eigen::Index i) { return fx(0, i) - xs(0, i) > eps_prime; };
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const Eigen::Index a = order[k];
    const Eigen::Index b = order[k + 1];
    if (moves_right(a) == moves_right(b) || xs(0, b) - xs(0, a) > resolution) {
      continue;
    }
    const Eigen::Index right = moves_right(a) ? a : b;
    const Eigen::Index left = moves_right(a) ? b : a;
    result.outcome = WitnessSearch::Outcome::Witness;
    result.witness = DiscontinuityWitness1D{xs(0, right), xs(0, left), fx(0, right) - fx(0, left)};
    return result;
  }
  return result;
}

}  // namespace qbrouwer
