#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qbrouwer/detail/random.hpp"
#include "qbrouwer/error.hpp"
#include "qbrouwer/pipeline.hpp"

namespace qbrouwer::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInternal = 1,
  kUsage = 2,
  kHypothesis = 3,
  kBudget = 4,
  kIo = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

struct RunConfig {
  std::string subcommand;
  int n = 2;
  double eps = 1.0;
  bool eps_given = false;
  std::optional<double> eps_prime;
  int resolution = 0;  // points per axis; 0 picks a per-dimension default
  std::uint64_t seed = detail::kDefaultSeed;
  std::size_t budget = kDefaultBudget;
  std::string out;     // empty: standard output
  std::string format;  // empty: the subcommand's default
  std::string map = "step";
  double constant = 0.25;
  int jung_trials = 2000;
};

/// Parses argv and runs the subcommand. Documents go to `out` (or --out),
/// diagnostics and summaries to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs an already parsed configuration.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// The two-dimensional extremal construction drawn in a 512x512 viewport:
/// the unit circle (radius 240), the dotted circle of radius eps/sqrt(3), the
/// three Voronoi sectors, and the image points in matching colors.
std::string render_figure_svg(double eps);

}  // namespace qbrouwer::cli
