#include "qbrouwer/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qbrouwer/maps.hpp"
#include "qbrouwer/oracle.hpp"
#include "qbrouwer/report.hpp"

namespace qbrouwer::cli {
namespace {

using report::Json;

constexpr std::array<double, 3> kModulusScales{0.05, 0.1, 0.2};

int default_resolution(int n) {
  if (n == 1) return 2001;
  if (n <= 3) return 201;
  return 41;
}

// Window sweeps cost ~(r / step)^n per point, so higher dimensions use a
// coarser grid for the modulus check than for the displacement sweep.
int modulus_resolution(int n, int resolution) { return n <= 3 ? resolution : std::min(resolution, 61); }

void require_dim(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidDimension, fmt::format("--n must be >= 1, got {}", n));
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps <= 2.0)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("--eps must lie in (0, 2] (every self-map of the ball is 2-continuous), got {}", eps));
  }
}

std::string format_or(const RunConfig& c, const char* fallback) { return c.format.empty() ? fallback : c.format; }

void emit(const RunConfig& c, const std::string& content, std::ostream& out) {
  if (c.out.empty()) {
    out << content;
    return;
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::Io, fmt::format("cannot open '{}' for writing", c.out));
  file << content;
  file.flush();
  if (!file) throw Error(ErrorKind::Io, fmt::format("failed writing '{}'", c.out));
}

Json header(const char* command) { return Json{{"schema_version", report::kSchemaVersion}, {"command", command}}; }

Json moduli_json(const MapFn& f, int n, int resolution, std::size_t budget, double eps) {
  GridSpec spec{n, modulus_resolution(n, resolution), true, budget};
  Json arr = Json::array();
  for (double r : kModulusScales) {
    if (!(r > spec.step())) continue;
    const double value = modulus_grid(f, r, spec);
    arr.push_back({{"r", r}, {"points_per_axis", spec.points_per_axis}, {"value", value},
                   {"within_eps", value <= eps + kTolGeom}});
  }
  return arr;
}

int cmd_radius(const RunConfig& c, std::ostream& out) {
  require_dim(c.n);
  const std::string format = format_or(c, "text");
  std::string body;
  if (format == "text") {
    body += fmt::format("{:>4}  {:>16}  {:>16}\n", "n", "R_n", fmt::format("{}/R_n", c.eps));
    for (int k = 1; k <= c.n; ++k) {
      body += fmt::format("{:>4}  {:>16.12f}  {:>16.12f}\n", k, jung_radius(k), c.eps / jung_radius(k));
    }
  } else if (format == "csv") {
    body += "n,jung_radius,bound\n";
    for (int k = 1; k <= c.n; ++k) body += fmt::format("{},{},{}\n", k, jung_radius(k), c.eps / jung_radius(k));
  } else if (format == "json") {
    Json doc = header("radius");
    doc["eps"] = c.eps;
    Json rows = Json::array();
    for (int k = 1; k <= c.n; ++k) rows.push_back({{"n", k}, {"jung_radius", jung_radius(k)}, {"bound", c.eps / jung_radius(k)}});
    doc["rows"] = std::move(rows);
    body = report::dump(doc);
  } else {
    throw Error(ErrorKind::InvalidArgument, fmt::format("radius does not support --format {}", format));
  }
  emit(c, body, out);
  return kSuccess;
}

int cmd_extremal(const RunConfig& c, std::ostream& out) {
  require_dim(c.n);
  require_eps(c.eps);
  const std::string format = format_or(c, "json");
  const ExtremalMap map(c.n, c.eps);
  const int resolution = c.resolution > 0 ? c.resolution : default_resolution(c.n);
  const GridSpec spec{c.n, resolution, true, c.budget};

  if (format == "csv") {
    std::ostringstream csv;
    write_displacement_csv(csv, as_map(map), spec);
    emit(c, csv.str(), out);
    return kSuccess;
  }
  if (format != "json") {
    throw Error(ErrorKind::InvalidArgument, fmt::format("extremal does not support --format {}", format));
  }
  const TightnessReport tight = tightness_report(c.n, c.eps, spec);
  Json doc = header("extremal");
  doc["dim"] = c.n;
  doc["eps"] = c.eps;
  doc["jung_radius"] = jung_radius(c.n);
  doc["bound"] = map.image_radius();
  doc["tie_break"] = "lowest_index";
  doc["vertices"] = report::to_json(map.vertices().matrix());
  doc["image_points"] = report::to_json(map.image_points().matrix());
  doc["image_diameter"] = image_diameter(map);
  doc["self_map"] = map.image_radius() <= 1.0;
  doc["oracle"] = report::to_json(tight);
  doc["modulus"] = moduli_json(as_map(map), c.n, resolution, c.budget, c.eps);
  emit(c, report::dump(doc), out);
  return kSuccess;
}

struct ResolvedMap {
  MapFn f;
  int dim = 1;
  double eps = 1.0;
  std::string name;
};

ResolvedMap resolve_map(const RunConfig& c) {
  ResolvedMap m;
  m.name = c.map;
  m.eps = c.eps;
  if (c.map == "step") {
    require_eps(c.eps);
    m.dim = 1;
    m.f = as_map(StepMap1D(c.eps));
  } else if (c.map == "extremal") {
    require_dim(c.n);
    require_eps(c.eps);
    m.dim = c.n;
    m.f = as_map(ExtremalMap(c.n, c.eps));
  } else if (c.map == "constant") {
    require_dim(c.n);
    require_eps(c.eps);
    if (!(std::abs(c.constant) <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "--constant must lie in [-1, 1]");
    }
    m.dim = c.n;
    Vector value = Vector::Zero(c.n);
    value(0) = c.constant;
    m.f = [value](const Vector&) { return value; };
  } else if (c.map == "identity") {
    require_dim(c.n);
    require_eps(c.eps);
    m.dim = c.n;
    m.f = [](const Vector& x) { return x; };
  } else {
    std::ifstream file(c.map, std::ios::binary);
    if (!file) {
      throw Error(ErrorKind::Io, fmt::format("'{}' is not a built-in map (step, extremal, constant, identity) and "
                                             "cannot be opened as a sampled map file",
                                             c.map));
    }
    SampledMap sampled = report::read_sampled_map(file);
    m.dim = sampled.dim();
    if (!c.eps_given) {
      if (!sampled.eps()) {
        throw Error(ErrorKind::InvalidArgument, "the sampled map has no 'eps'; pass --eps");
      }
      m.eps = *sampled.eps();
    }
    require_eps(m.eps);
    m.f = as_map(sampled);
  }
  return m;
}

int cmd_pipeline(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!c.eps_prime) throw Error(ErrorKind::InvalidArgument, "pipeline needs --eps-prime");
  const ResolvedMap m = resolve_map(c);
  if (c.format != "" && c.format != "json") {
    throw Error(ErrorKind::InvalidArgument, fmt::format("pipeline does not support --format {}", c.format));
  }
  PipelineOptions options;
  options.budget = c.budget;
  const PipelineRun run = run_pipeline(m.f, m.dim, m.eps, *c.eps_prime, options);

  Json doc = header("pipeline");
  doc["map"] = m.name;
  const Json body = report::to_json(run);
  for (const auto& [key, value] : body.items()) doc[key] = value;
  emit(c, report::dump(doc), out);

  const EpsFixedPointCertificate& cert = run.certificate;
  err << fmt::format("eps'-fixed point found: |f(z) - z| = {:.9f} < eps' = {} at sample {} (alpha = {}, gamma = {:.6g}, "
                     "solver residual = {:.3g}, {} samples)\n",
                     run.verified_displacement, run.params.eps_prime, cert.sample_index, run.params.alpha,
                     run.params.gamma, run.fixed_point.residual, run.samples);
  return kSuccess;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_dim(c.n);
  require_eps(c.eps);
  if (c.format != "" && c.format != "json") {
    throw Error(ErrorKind::InvalidArgument, fmt::format("verify does not support --format {}", c.format));
  }
  const int resolution = c.resolution > 0 ? c.resolution : default_resolution(c.n);
  const GridSpec spec{c.n, resolution, true, c.budget};
  const TightnessReport tight = tightness_report(c.n, c.eps, spec);
  const JungTestResult jung = jung_random_test(c.n, c.jung_trials, 10, c.seed);
  const ExtremalMap map(c.n, c.eps);

  Json doc = header("verify");
  doc["seed"] = c.seed;
  doc["tightness"] = report::to_json(tight);
  doc["jung"] = report::to_json(jung);
  doc["modulus"] = moduli_json(as_map(map), c.n, resolution, c.budget, c.eps);
  bool modulus_ok = true;
  for (const auto& row : doc["modulus"]) modulus_ok = modulus_ok && row["within_eps"].get<bool>();
  const bool ok = tight.holds && jung.passed() && modulus_ok;
  doc["passed"] = ok;
  emit(c, report::dump(doc), out);
  if (!ok) {
    err << "verification failed: see the report for the violated check\n";
    return kInternal;
  }
  return kSuccess;
}

int cmd_figure(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_eps(c.eps);
  if (c.format != "" && c.format != "svg") {
    throw Error(ErrorKind::InvalidArgument, fmt::format("figure does not support --format {}", c.format));
  }
  if (c.eps > std::sqrt(3.0)) {
    err << fmt::format("warning: eps/sqrt(3) = {:.6f} exceeds 1; the dotted circle lies outside the unit disk\n",
                       c.eps / std::sqrt(3.0));
  }
  emit(c, render_figure_svg(c.eps), out);
  return kSuccess;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidCombination:
    case ErrorKind::Domain:
    case ErrorKind::Parse:
      return kUsage;
    case ErrorKind::Hypothesis:
      return kHypothesis;
    case ErrorKind::Resource:
    case ErrorKind::NoConvergence:
      return kBudget;
    case ErrorKind::Io:
      return kIo;
    case ErrorKind::Covering:
    case ErrorKind::Inconsistency:
      return kInternal;
  }
  return kInternal;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == "radius") return cmd_radius(config, out);
    if (config.subcommand == "extremal") return cmd_extremal(config, out);
    if (config.subcommand == "pipeline") return cmd_pipeline(config, out, err);
    if (config.subcommand == "verify") return cmd_verify(config, out, err);
    if (config.subcommand == "figure") return cmd_figure(config, out, err);
    err << fmt::format("error: unknown subcommand '{}'\n", config.subcommand);
    return kUsage;
  } catch (const Error& e) {
    err << fmt::format("error ({}): {}\n", to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error (resource): out of memory\n";
    return kBudget;
  } catch (const std::exception& e) {
    err << fmt::format("error (internal): {}\n", e.what());
    return kInternal;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate fixed points of eps-continuous self-maps of the unit ball"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", config.out, "Write the document to this path instead of standard output");
    sub->add_option("--format", config.format, "Output format (json, csv, text or svg, per subcommand)");
  };
  auto add_eps = [&](CLI::App* sub) {
    sub->add_option_function<double>(
        "--eps", [&](double v) { config.eps = v; config.eps_given = true; }, "Continuity defect eps in (0, 2]");
  };

  CLI::App* radius = app.add_subcommand("radius", "Print R_n and eps/R_n for dimensions 1..n");
  radius->add_option("--n", config.n, "Largest dimension")->required();
  add_eps(radius);
  add_common(radius);

  CLI::App* extremal = app.add_subcommand("extremal", "Build and certify the extremal map");
  extremal->add_option("--n", config.n, "Dimension")->required();
  add_eps(extremal);
  extremal->add_option("--resolution", config.resolution, "Oracle grid points per axis");
  extremal->add_option("--budget", config.budget, "Maximum grid size");
  add_common(extremal);

  CLI::App* pipeline = app.add_subcommand("pipeline", "Find a certified eps'-fixed point");
  pipeline->add_option("--map", config.map, "step | extremal | constant | identity | path to a sampled map file");
  pipeline->add_option("--n", config.n, "Dimension of built-in maps other than step");
  add_eps(pipeline);
  pipeline->add_option("--eps-prime", config.eps_prime, "Target displacement eps'")->required();
  pipeline->add_option("--constant", config.constant, "First coordinate of the constant map's value");
  pipeline->add_option("--budget", config.budget, "Maximum sample grid size");
  add_common(pipeline);

  CLI::App* verify = app.add_subcommand("verify", "Brute-force check of the optimal bound and of Jung's theorem");
  verify->add_option("--n", config.n, "Dimension")->required();
  add_eps(verify);
  verify->add_option("--resolution", config.resolution, "Oracle grid points per axis");
  verify->add_option("--seed", config.seed, "Seed for the randomized Jung test");
  verify->add_option("--jung-trials", config.jung_trials, "Randomized Jung trials");
  verify->add_option("--budget", config.budget, "Maximum grid size");
  add_common(verify);

  CLI::App* figure = app.add_subcommand("figure", "Draw the two-dimensional extremal construction as SVG");
  add_eps(figure);
  add_common(figure);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  return execute(config, out, err);
}

}  // namespace qbrouwer::cli
