#include "dowg/cli.hpp"

#include <ostream>
#include <sstream>

#include "dowg/config.hpp"
#include "dowg/errors.hpp"
#include "dowg/report.hpp"
#include "dowg/selftest.hpp"

namespace dowg {

namespace {

void print_paths(std::ostream& out, const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) out << "wrote " << p.string() << '\n';
}

bool all_converged(const std::vector<ConvergenceReport>& reports, std::ostream& err) {
  bool ok = true;
  for (const auto& r : reports)
    for (const auto& row : r.rows)
      if (!row.outer_converged) {
        err << "warning: source iteration did not converge for " << r.scheme.name() << " at 1/h = " << row.inv_h
            << '\n';
        ok = false;
      }
  return ok;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string cmd = command_name(cfg.command);
  if (cfg.command != Command::Selftest) ensure_dir(cfg.out);
  switch (cfg.command) {
    case Command::Selftest: {
      const bool ok = print_selftest(out, run_selftest());
      return ok ? exit_code::ok : exit_code::selftest_failed;
    }
    case Command::Solve: {
      StudyConfig study = cfg.study();
      study.levels = {cfg.level_hi};
      study.validate();
      const ManufacturedCase mc = build_case(study.case_name, study.medium, study.eta);
      const LevelSolution sol = solve_level(study, mc, cfg.level_hi);
      const ErrorNorms e = measure_error(sol.disc, sol.result.field, mc);
      ConvergenceReport rep{study.case_name, study.scheme, study.k, study.M, {}};
      LevelRow row;
      row.level = cfg.level_hi;
      row.inv_h = 1 << cfg.level_hi;
      row.error = e.l2_dom;
      row.triple_error = e.triple;
      row.outer_iterations = sol.result.trace.iterations;
      row.outer_converged = sol.result.trace.converged;
      rep.rows.push_back(row);
      auto paths = emit_reports({rep}, cmd, cfg.formats, cfg.out);
      std::ostringstream trace;
      sol.result.trace.write_csv(trace);
      const auto trace_path =
          std::filesystem::path(cfg.out) / (output_stem(cmd, study.case_name, study.scheme.name(), study.k) + "_trace.csv");
      write_text_file(trace_path, trace.str());
      paths.push_back(trace_path);
      out << "1/h = " << row.inv_h << "  error = " << format_sci(e.l2_dom) << "  triple-norm error = "
          << format_sci(e.triple) << "  outer iterations = " << row.outer_iterations << '\n';
      print_paths(out, paths);
      return all_converged({rep}, err) ? exit_code::ok : exit_code::solver;
    }
    case Command::Convergence:
    case Command::Compare: {
      const StudyConfig study = cfg.study();
      std::vector<ConvergenceReport> reports;
      if (cfg.command == Command::Convergence) {
        reports.push_back(run_convergence(study));
      } else {
        reports = run_comparison(study);
      }
      write_markdown(out, reports);
      print_paths(out, emit_reports(reports, cmd, cfg.formats, cfg.out));
      return all_converged(reports, err) ? exit_code::ok : exit_code::solver;
    }
    case Command::AngularStudy: {
      const AngularStudy st = run_angular_study(cfg.study(), cfg.level_hi, cfg.directions);
      write_angular_markdown(out, st);
      out << (st.monotone ? "error non-increasing in M\n" : "error NOT monotone in M\n");
      print_paths(out, emit_angular(st, cfg.formats, cfg.out));
      return exit_code::ok;
    }
  }
  return exit_code::ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const ParseResult parsed = parse_config(argc, argv);
    if (!parsed.help.empty()) {
      out << parsed.help;
      return exit_code::ok;
    }
    return execute(parsed.config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'dowg --help' for the list of options\n";
    return exit_code::usage;
  } catch (const ValidationError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return exit_code::validation;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return exit_code::solver;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::validation;
  }
}

}  // namespace dowg
