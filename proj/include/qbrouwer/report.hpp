#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>

#include "qbrouwer/maps.hpp"
#include "qbrouwer/oracle.hpp"
#include "qbrouwer/pipeline.hpp"

namespace qbrouwer::report {

/// Bumped whenever a field of an emitted document changes meaning or name.
/// Field names are documented in schema/report.schema.json.
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Eigen::MatrixXd& columns);  // array of columns
Json to_json(const PipelineRun& run);
Json to_json(const TightnessReport& report);
Json to_json(const JungTestResult& result);

/// Two-space indented text with a trailing newline. Identical input gives
/// identical bytes.
std::string dump(const Json& doc);

/// Reads {schema_version, dim, covering_radius, [eps], points, values}.
/// Throws Parse for malformed documents.
SampledMap read_sampled_map(std::istream& in);
SampledMap read_sampled_map(std::string_view text);
Json sampled_map_json(const SampledMap& map);

}  // namespace qbrouwer::report
