#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dowg/report.hpp"
#include "dowg/verify.hpp"

namespace dowg {

enum class Command { Solve, Convergence, Compare, AngularStudy, Selftest };

std::string command_name(Command c);

/// Everything a CLI run needs. Defaults: example1, WG, Q1, levels 3-7,
/// M = 20, sigma_t = 2, sigma_s = 1/2, eta = 0.5, c_p = 0.1, c = 1.
struct RunConfig {
  Command command = Command::Convergence;
  std::string case_name = "example1";
  std::string scheme = "wg";
  int k = 1;
  int level_lo = 3;
  int level_hi = 7;
  std::vector<int> directions{20};  // angular-study: the list of M values
  double sigma_t = 2.0;
  double sigma_s = 0.5;
  double eta = 0.5;
  std::optional<double> tol;  // outer; unset: per-level study tolerance
  double linear_tol = 1e-10;
  double cp = 0.1;
  double sd_c = 1.0;
  bool renormalize_kernel = false;
  AngleOrdering ordering = AngleOrdering::Jacobi;
  std::string out = "results";
  std::vector<OutputFormat> formats{OutputFormat::Csv, OutputFormat::Markdown, OutputFormat::Svg};

  /// Throws ValidationError for out-of-range values.
  void validate() const;
  SchemeKind scheme_kind() const;
  StudyConfig study() const;
};

struct ParseResult {
  RunConfig config;
  std::string help;  // non-empty when --help was requested
};

/// Parses `dowg <command> [flags]`. A flat `key = value` file given with
/// --config supplies values that explicit flags override; keys are the long
/// flag names. Malformed input and unknown keys throw UsageError naming the
/// offending key; out-of-range values throw ValidationError.
ParseResult parse_config(int argc, const char* const* argv);

}  // namespace dowg
