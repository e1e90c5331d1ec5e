#include "dowg/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dowg/errors.hpp"

namespace dowg {

namespace {
constexpr double kPi = std::numbers::pi;
}

ProblemData ManufacturedCase::data() const {
  // captured by value so the data outlives the case object
  const AngularFunction f = source, u = exact;
  return ProblemData{[f](double x, double y, const Direction& s) { return f(x, y, s.theta()); },
                     [u](double x, double y, const Direction& s) { return u(x, y, s.theta()); }};
}

ManufacturedCase build_case(const std::string& name, Medium medium, double eta) {
  if (!(medium.sigma_t > 0.0) || medium.sigma_s < 0.0) throw ValidationError("need sigma_t > 0 and sigma_s >= 0");
  ManufacturedCase mc;
  mc.name = name;
  mc.medium = medium;
  const double st = medium.sigma_t, ss = medium.sigma_s;
  if (name == "example1") {
    mc.phase = HenyeyGreenstein{eta, 2};
    validate_phase(mc.phase);
    mc.exact = [](double x, double y, double) { return std::sin(kPi * x) * std::sin(kPi * y); };
    mc.exact_scatter = mc.exact;
    mc.source = [st, ss](double x, double y, double th) {
      const double u = std::sin(kPi * x) * std::sin(kPi * y);
      const double adv = kPi * (std::cos(th) * std::cos(kPi * x) * std::sin(kPi * y) +
                                std::sin(th) * std::sin(kPi * x) * std::cos(kPi * y));
      return adv + (st - ss) * u;
    };
    return mc;
  }
  if (name == "example2") {
    const double a = 0.5, b = 0.5, c = 1.0 / (1.0 + 6.0 * ss);
    mc.phase = LinearAnisotropic{};
    mc.c = c;
    mc.exact = [a, b, c](double x, double y, double th) { return std::exp(-a * x - b * y) * (1.0 + c * std::cos(th)); };
    mc.exact_scatter = [a, b, c](double x, double y, double th) {
      return std::exp(-a * x - b * y) * (1.0 + 0.25 * c * std::cos(th));
    };
    mc.source = [a, b, c, st, ss](double x, double y, double th) {
      const double e = std::exp(-a * x - b * y);
      const double u = e * (1.0 + c * std::cos(th));
      const double ku = e * (1.0 + 0.25 * c * std::cos(th));
      return -(a * std::cos(th) + b * std::sin(th)) * u + st * u - ss * ku;
    };
    return mc;
  }
  throw ValidationError("unknown case '" + name + "' (expected example1 or example2)");
}

RadianceField project_case(const Discretization& disc, const ManufacturedCase& mc) {
  const int k = disc.basis.order();
  const LocalBasis fine(k, k + 3, k + 2);
  RadianceField out;
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m) {
    const double th = disc.quad.nodes[m].theta();
    out.ordinates.push_back(l2_project(disc.mesh, fine, [&](double x, double y) { return mc.exact(x, y, th); }));
  }
  return out;
}

ErrorNorms measure_error(const Discretization& disc, const RadianceField& field, const ManufacturedCase& mc) {
  if (field.size() != disc.num_ordinates()) throw std::invalid_argument("measure_error: wrong number of ordinates");
  const int k = disc.basis.order();
  const LocalBasis fine(k, k + 3, k + 3);
  const auto& quad = fine.quadrature();
  const int nd = fine.dofs();
  const auto& mesh = disc.mesh;
  double vol = 0.0, edge_sum = 0.0;
  for (std::size_t m = 0; m < disc.num_ordinates(); ++m) {
    const Direction& s = disc.quad.nodes[m];
    const double th = s.theta();
    const double w = disc.quad.weights[m];
    double vm = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Cell& cell = mesh.cells[c];
      const auto co = cell_coeffs(field[m], static_cast<int>(c), nd);
      const Eigen::VectorXd uh = fine.values() * Eigen::Map<const Eigen::VectorXd>(co.data(), nd);
      for (std::size_t q = 0; q < quad.points.size(); ++q) {
        const double x = cell.lower[0] + (cell.upper[0] - cell.lower[0]) * quad.points[q][0];
        const double y = cell.lower[1] + (cell.upper[1] - cell.lower[1]) * quad.points[q][1];
        const double e = mc.exact(x, y, th) - uh[static_cast<Eigen::Index>(q)];
        vm += quad.weights[q] * cell.area() * e * e;
      }
    }
    double em = 0.0;
    for (const Edge& edge : mesh.edges) {
      const double an = std::abs(s.x() * edge.normal[0] + s.y() * edge.normal[1]);
      if (an == 0.0) continue;
      const Eigen::VectorXd a = face_trace(fine, cell_coeffs(field[m], edge.cells[0], nd), edge.local_face[0]);
      if (edge.interior()) {
        // the exact solution is continuous, so e - {e} = -(u_h - {u_h})
        const Eigen::VectorXd b = face_trace(fine, cell_coeffs(field[m], edge.cells[1], nd), edge.local_face[1]);
        for (Eigen::Index q = 0; q < a.size(); ++q) {
          const double d = 0.5 * (a[q] - b[q]);
          em += quad.edge.weights[q] * edge.length() * an * 2.0 * d * d;
        }
      } else {
        for (Eigen::Index q = 0; q < a.size(); ++q) {
          const double t = quad.edge.points[q];
          const double x = edge.p0[0] + t * (edge.p1[0] - edge.p0[0]);
          const double y = edge.p0[1] + t * (edge.p1[1] - edge.p0[1]);
          const double e = mc.exact(x, y, th) - a[q];
          em += quad.edge.weights[q] * edge.length() * an * e * e;
        }
      }
    }
    vol += w * vm;
    edge_sum += w * em;
  }
  return ErrorNorms{std::sqrt(vol), std::sqrt(vol + edge_sum)};
}

double study_outer_tolerance(double h, int k) {
  return std::max(1e-11, std::min(1e-3, 1e-5 * std::pow(h, k + 0.5)));
}

void StudyConfig::validate() const {
  if (k != 1 && k != 2) throw ValidationError("element order must be 1 or 2");
  if (levels.empty()) throw ValidationError("at least one level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || levels[i] > 10) throw ValidationError("levels must lie in 1..10");
    if (i > 0 && levels[i] <= levels[i - 1]) throw ValidationError("levels must be strictly ascending");
  }
  if (M < 2 || M % 2 != 0) throw ValidationError("number of angular intervals M must be even and >= 2");
  if (outer_tol && !(*outer_tol > 0.0)) throw ValidationError("outer tolerance must be > 0");
  scheme.validate();
  linear.validate();
}

void ConvergenceReport::compute_eoc() {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].eoc.reset();
    if (i == 0) continue;
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    rows[i].eoc = std::log(a.error / b.error) / std::log(static_cast<double>(b.inv_h) / a.inv_h);
  }
}

LevelSolution solve_level(const StudyConfig& cfg, const ManufacturedCase& mc, int level) {
  const AngularQuadrature quad = build_circle_trapezoid(cfg.M);
  LevelSolution sol{make_discretization(level, cfg.k, quad, mc.phase, cfg.medium, cfg.renormalize_kernel), {}};
  const auto systems = assemble_all(sol.disc, cfg.scheme, mc.data());
  SourceIterationConfig si;
  si.tol = cfg.outer_tol ? *cfg.outer_tol : study_outer_tolerance(sol.disc.mesh.h, cfg.k);
  si.max_outer = cfg.max_outer;
  si.ordering = cfg.ordering;
  sol.result = source_iteration(systems, sol.disc, si, cfg.linear);
  return sol;
}

ConvergenceReport run_convergence(const StudyConfig& cfg) {
  cfg.validate();
  const ManufacturedCase mc = build_case(cfg.case_name, cfg.medium, cfg.eta);
  ConvergenceReport rep;
  rep.case_name = cfg.case_name;
  rep.scheme = cfg.scheme;
  rep.k = cfg.k;
  rep.M = cfg.M;
  for (int level : cfg.levels) {
    const auto t0 = std::chrono::steady_clock::now();
    LevelRow row;
    row.level = level;
    row.inv_h = 1 << level;
    try {
      const LevelSolution sol = solve_level(cfg, mc, level);
      const ErrorNorms err = measure_error(sol.disc, sol.result.field, mc);
      row.error = err.l2_dom;
      row.triple_error = err.triple;
      row.outer_iterations = sol.result.trace.iterations;
      row.outer_converged = sol.result.trace.converged;
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "level " << level << " (1/h = " << row.inv_h << "): " << e.what();
      throw SolverError(msg.str(), e.residual());
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.rows.push_back(row);
  }
  rep.compute_eoc();
  return rep;
}

std::vector<ConvergenceReport> run_comparison(const StudyConfig& cfg) {
  std::vector<ConvergenceReport> out;
  for (const SchemeKind scheme :
       {SchemeKind::wg(), SchemeKind::dodg(cfg.scheme.cp), SchemeKind::dodsd(cfg.scheme.sd_c)}) {
    StudyConfig c = cfg;
    c.scheme = scheme;
    out.push_back(run_convergence(c));
  }
  return out;
}

AngularStudy run_angular_study(const StudyConfig& cfg, int level, const std::vector<int>& Ms) {
  if (Ms.empty()) throw ValidationError("angular study needs at least one M");
  for (std::size_t i = 1; i < Ms.size(); ++i)
    if (Ms[i] <= Ms[i - 1]) throw ValidationError("M values must be strictly ascending");
  const ManufacturedCase mc = build_case(cfg.case_name, cfg.medium, cfg.eta);
  AngularStudy st;
  st.case_name = cfg.case_name;
  st.scheme = cfg.scheme;
  st.k = cfg.k;
  st.level = level;
  st.monotone = true;
  double slack = 0.0;
  for (int M : Ms) {
    StudyConfig c = cfg;
    c.M = M;
    c.levels = {level};
    // differences between M values can sit far below the spatial error, so
    // the iteration error has to be pushed below them
    if (!c.outer_tol) c.outer_tol = kAngularStudyTol;
    c.validate();
    const LevelSolution sol = solve_level(c, mc, level);
    const double err = measure_error(sol.disc, sol.result.field, mc).l2_dom;
    // a difference below the outer tolerance is iteration noise
    slack = std::max(slack, *c.outer_tol);
    if (!st.rows.empty() && err > st.rows.back().error + slack) st.monotone = false;
    st.rows.push_back({M, err});
  }
  return st;
}

}  // namespace dowg
