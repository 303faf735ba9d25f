#include "qbrouwer/report.hpp"

#include <fmt/format.h>

#include <istream>
#include <sstream>

#include "qbrouwer/error.hpp"

namespace qbrouwer::report {

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Json to_json(const Eigen::MatrixXd& columns) {
  Json arr = Json::array();
  for (Eigen::Index j = 0; j < columns.cols(); ++j) arr.push_back(to_json(Vector(columns.col(j))));
  return arr;
}

Json to_json(const PipelineRun& run) {
  const PipelineParams& p = run.params;
  const EpsFixedPointCertificate& c = run.certificate;
  Json doc;
  doc["params"] = {{"dim", p.dim},         {"eps", p.eps},     {"eps_prime", p.eps_prime},
                   {"gamma", p.gamma},     {"alpha", p.alpha}, {"fp_tol", p.fp_tol},
                   {"jung_radius", jung_radius(p.dim)}};
  doc["grid"] = {{"samples", run.samples},
                 {"alpha_attempts", run.alpha_attempts},
                 {"edges_checked", run.simplicial.edges_checked},
                 {"max_edge_image_distance", run.simplicial.image_distance}};
  doc["solver"] = {{"y", to_json(run.fixed_point.y)},
                   {"residual", run.fixed_point.residual},
                   {"evaluations", run.fixed_point.evaluations}};
  doc["certificate"] = {{"sample_index", c.sample_index},
                        {"z", to_json(c.z)},
                        {"fz", to_json(c.fz)},
                        {"displacement", c.displacement},
                        {"bound", c.bound},
                        {"image_to_average", c.image_to_average},
                        {"sample_to_point", c.sample_to_point},
                        {"residual", c.residual},
                        {"jung_term", p.jung_term()},
                        {"certified_bound", p.certified_bound()}};
  doc["verification"] = {{"displacement", run.verified_displacement},
                         {"holds", run.verified_displacement < p.eps_prime}};
  return doc;
}

Json to_json(const TightnessReport& r) {
  return Json{{"dim", r.dim},
              {"eps", r.eps},
              {"points_per_axis", r.points_per_axis},
              {"grid_step", r.grid_step},
              {"grid_points", r.grid_points},
              {"min_displacement", r.min_displacement},
              {"argmin", to_json(r.argmin)},
              {"theoretical_bound", r.theoretical_bound},
              {"gap", r.gap},
              {"gap_allowance", kTightnessSlack * r.grid_step},
              {"holds", r.holds}};
}

Json to_json(const JungTestResult& r) {
  Json doc{{"dim", r.dim},
           {"trials", r.trials},
           {"worst_nearest_ratio", r.worst_nearest_ratio},
           {"worst_ball_ratio", r.worst_ball_ratio},
           {"passed", r.passed()}};
  if (r.counterexample) {
    const JungCounterexample& c = *r.counterexample;
    doc["counterexample"] = {
        {"kind", c.kind == JungCounterexample::Kind::NearestPoint ? "nearest_point" : "enclosing_ball"},
        {"trial", c.trial},
        {"points", to_json(c.points)},
        {"y", to_json(c.y)},
        {"value", c.value},
        {"bound", c.bound}};
  }
  return doc;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

namespace {

Eigen::MatrixXd read_columns(const Json& arr, const char* field, int dim) {
  if (!arr.is_array()) {
    throw Error(ErrorKind::Parse, fmt::format("'{}' must be an array of points", field));
  }
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(arr.size()));
  for (std::size_t j = 0; j < arr.size(); ++j) {
    const Json& row = arr[j];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim)) {
      throw Error(ErrorKind::Parse, fmt::format("'{}'[{}] must be an array of {} numbers", field, j, dim));
    }
    for (int d = 0; d < dim; ++d) {
      if (!row[static_cast<std::size_t>(d)].is_number()) {
        throw Error(ErrorKind::Parse, fmt::format("'{}'[{}][{}] is not a number", field, j, d));
      }
      m(d, static_cast<Eigen::Index>(j)) = row[static_cast<std::size_t>(d)].get<double>();
    }
  }
  return m;
}

}  // namespace

SampledMap read_sampled_map(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, fmt::format("sampled map is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) {
    throw Error(ErrorKind::Parse, "sampled map must be a JSON object");
  }
  for (const char* key : {"schema_version", "dim", "covering_radius", "points", "values"}) {
    if (!doc.contains(key)) {
      throw Error(ErrorKind::Parse, fmt::format("sampled map is missing '{}'", key));
    }
  }
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion) {
    throw Error(ErrorKind::Parse, fmt::format("unsupported sampled map schema_version (expected {})", kSchemaVersion));
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1) {
    throw Error(ErrorKind::Parse, "'dim' must be a positive integer");
  }
  if (!doc["covering_radius"].is_number()) {
    throw Error(ErrorKind::Parse, "'covering_radius' must be a number");
  }
  const int dim = doc["dim"].get<int>();
  Eigen::MatrixXd points = read_columns(doc["points"], "points", dim);
  Eigen::MatrixXd values = read_columns(doc["values"], "values", dim);
  if (points.cols() != values.cols()) {
    throw Error(ErrorKind::Parse,
                fmt::format("{} points but {} values; the arrays must be parallel", points.cols(), values.cols()));
  }
  if (points.cols() == 0) {
    throw Error(ErrorKind::Parse, "sampled map has no points");
  }
  std::optional<double> eps;
  if (doc.contains("eps")) {
    if (!doc["eps"].is_number()) throw Error(ErrorKind::Parse, "'eps' must be a number");
    eps = doc["eps"].get<double>();
  }
  return SampledMap(PointSet(std::move(points)), std::move(values), doc["covering_radius"].get<double>(), eps);
}

SampledMap read_sampled_map(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_sampled_map(in);
}

Json sampled_map_json(const SampledMap& map) {
  Json doc{{"schema_version", kSchemaVersion}, {"dim", map.dim()}, {"covering_radius", map.covering_radius()}};
  if (map.eps()) doc["eps"] = *map.eps();
  doc["points"] = to_json(map.domain().matrix());
  doc["values"] = to_json(map.values());
  return doc;
}

}  // namespace qbrouwer::report
