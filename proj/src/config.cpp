#include "dowg/config.hpp"

#include <CLI11.hpp>

#include <sstream>

#include "dowg/errors.hpp"

namespace dowg {

std::string command_name(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Convergence: return "convergence";
    case Command::Compare: return "compare";
    case Command::AngularStudy: return "angular-study";
    default: return "selftest";
  }
}

namespace {

int parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("--" + key + ": '" + text + "' is not an integer");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// "5", "3-7" or "3..7"
std::pair<int, int> parse_levels(const std::string& text) {
  std::size_t pos = text.find("..");
  std::size_t width = 2;
  if (pos == std::string::npos) {
    pos = text.find('-');
    width = 1;
  }
  if (pos == std::string::npos) {
    const int v = parse_int("levels", text);
    return {v, v};
  }
  return {parse_int("levels", text.substr(0, pos)), parse_int("levels", text.substr(pos + width))};
}

}  // namespace

void RunConfig::validate() const {
  if (case_name != "example1" && case_name != "example2")
    throw ValidationError("--case must be example1 or example2, got '" + case_name + "'");
  if (k != 1 && k != 2) throw ValidationError("--order must be 1 or 2");
  if (level_lo < 1 || level_hi > 10 || level_lo > level_hi)
    throw ValidationError("--levels must satisfy 1 <= first <= last <= 10");
  if (directions.empty()) throw ValidationError("--directions needs at least one value");
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i] < 2 || directions[i] % 2 != 0) throw ValidationError("--directions values must be even and >= 2");
    if (i > 0 && directions[i] <= directions[i - 1]) throw ValidationError("--directions values must be ascending");
  }
  if (command != Command::AngularStudy && directions.size() != 1)
    throw ValidationError("--directions takes a single value except for angular-study");
  if (!(sigma_t > 0.0)) throw ValidationError("--sigma-t must be > 0");
  if (!(sigma_s >= 0.0)) throw ValidationError("--sigma-s must be >= 0");
  if (!(eta > -1.0 && eta < 1.0)) throw ValidationError("--eta must lie in (-1, 1)");
  if (tol && !(*tol > 0.0)) throw ValidationError("--tol must be > 0");
  if (!(linear_tol > 0.0 && linear_tol < 1.0)) throw ValidationError("--linear-tol must lie in (0, 1)");
  if (!(cp > 0.0)) throw ValidationError("--cp must be > 0");
  if (!(sd_c > 0.0)) throw ValidationError("--sd-c must be > 0");
  if (formats.empty()) throw ValidationError("--format needs at least one of csv, md, svg");
}

SchemeKind RunConfig::scheme_kind() const {
  if (scheme == "dodg") return SchemeKind::dodg(cp);
  if (scheme == "dodsd") return SchemeKind::dodsd(sd_c);
  SchemeKind s = SchemeKind::wg();
  s.cp = cp;
  s.sd_c = sd_c;
  return s;
}

StudyConfig RunConfig::study() const {
  StudyConfig s;
  s.case_name = case_name;
  s.scheme = scheme_kind();
  s.k = k;
  s.levels.clear();
  for (int l = level_lo; l <= level_hi; ++l) s.levels.push_back(l);
  s.M = directions.front();
  s.medium = Medium{sigma_t, sigma_s};
  s.eta = eta;
  s.renormalize_kernel = renormalize_kernel;
  s.outer_tol = tol;
  s.ordering = ordering;
  s.linear.rel_tol = linear_tol;
  return s;
}

ParseResult parse_config(int argc, const char* const* argv) {
  CLI::App app{"Discrete-ordinate weak Galerkin radiative transfer solver", "dowg"};
  app.allow_config_extras(false);
  app.set_config("--config", "", "flat key = value file; flags given on the command line take precedence");

  RunConfig cfg;
  std::string command, levels = "3-7", directions, ordering = "jacobi", format = "csv,md,svg";
  std::optional<double> tol;
  app.add_option("command", command, "solve | convergence | compare | angular-study | selftest")
      ->required()
      ->check(CLI::IsMember({"solve", "convergence", "compare", "angular-study", "selftest"}));
  app.add_option("--case", cfg.case_name, "example1 | example2")->check(CLI::IsMember({"example1", "example2"}));
  app.add_option("--scheme", cfg.scheme, "wg | dodg | dodsd")->check(CLI::IsMember({"wg", "dodg", "dodsd"}));
  app.add_option("--order", cfg.k, "element order k (1 or 2)");
  app.add_option("--levels", levels, "refinement level or range, e.g. 5 or 3-7 (1/h = 2^level)");
  app.add_option("--directions", directions, "angular intervals M (comma list for angular-study)");
  app.add_option("--sigma-t", cfg.sigma_t, "total attenuation coefficient");
  app.add_option("--sigma-s", cfg.sigma_s, "scattering coefficient");
  app.add_option("--eta", cfg.eta, "Henyey-Greenstein anisotropy");
  app.add_option("--tol", tol, "outer iteration tolerance (default: per-level study tolerance)");
  app.add_option("--linear-tol", cfg.linear_tol, "relative residual tolerance of Krylov solves");
  app.add_option("--cp", cfg.cp, "DODG jump penalty");
  app.add_option("--sd-c", cfg.sd_c, "DODSD multiplier c in delta = c h");
  app.add_flag("--renormalize-kernel", cfg.renormalize_kernel, "scale kernel rows to unit mass");
  app.add_option("--angle-ordering", ordering, "jacobi | gauss-seidel")
      ->check(CLI::IsMember({"jacobi", "gauss-seidel"}));
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--format", format, "comma list of csv, md, svg");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    return ParseResult{cfg, app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (command == "solve") cfg.command = Command::Solve;
  else if (command == "convergence") cfg.command = Command::Convergence;
  else if (command == "compare") cfg.command = Command::Compare;
  else if (command == "angular-study") cfg.command = Command::AngularStudy;
  else cfg.command = Command::Selftest;

  std::tie(cfg.level_lo, cfg.level_hi) = parse_levels(levels);
  if (directions.empty()) {
    cfg.directions = cfg.command == Command::AngularStudy ? std::vector<int>{4, 8, 16, 32} : std::vector<int>{20};
  } else {
    cfg.directions.clear();
    for (const auto& d : split(directions, ',')) cfg.directions.push_back(parse_int("directions", d));
  }
  cfg.ordering = ordering == "gauss-seidel" ? AngleOrdering::GaussSeidel : AngleOrdering::Jacobi;
  cfg.tol = tol;
  cfg.formats.clear();
  for (const auto& f : split(format, ',')) {
    if (f == "csv") cfg.formats.push_back(OutputFormat::Csv);
    else if (f == "md" || f == "markdown") cfg.formats.push_back(OutputFormat::Markdown);
    else if (f == "svg") cfg.formats.push_back(OutputFormat::Svg);
    else throw UsageError("--format: unknown format '" + f + "'");
  }
  cfg.validate();
  return ParseResult{cfg, ""};
}

}  // namespace dowg
