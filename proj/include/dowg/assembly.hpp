#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dowg/angular.hpp"
#include "dowg/fem.hpp"
#include "dowg/linear_solver.hpp"
#include "dowg/mesh.hpp"
#include "dowg/sparse.hpp"

namespace dowg {

/// Constant total attenuation and scattering coefficients.
struct Medium {
  double sigma_t = 2.0;
  double sigma_s = 0.5;
};

/// Spatial scheme: weak Galerkin, upwind DG with jump penalty c_p, or
/// discontinuous streamline diffusion with delta = sd_c * h.
struct SchemeKind {
  enum class Kind { WG, DODG, DODSD };
  Kind kind = Kind::WG;
  double cp = 0.1;
  double sd_c = 1.0;

  static SchemeKind wg() { return {}; }
  static SchemeKind dodg(double cp) { return {Kind::DODG, cp, 1.0}; }
  static SchemeKind dodsd(double c) { return {Kind::DODSD, 0.1, c}; }

  void validate() const;
  std::string name() const;  // "wg", "dodg", "dodsd"
};

/// Everything one refinement level needs: mesh, local space, ordinates,
/// scattering kernel and medium.
struct Discretization {
  QuadMesh mesh;
  LocalBasis basis;
  AngularQuadrature quad;
  ScatterKernel kernel;
  Medium medium;

  int dofs_per_cell() const { return basis.dofs(); }
  std::size_t ndof() const { return mesh.num_cells() * static_cast<std::size_t>(basis.dofs()); }
  std::size_t num_ordinates() const { return quad.size(); }
};

Discretization make_discretization(int level, int k, const AngularQuadrature& quad, const PhaseFunction& phase,
                                   Medium medium, bool renormalize_kernel = false);

using DirectionalFunction = std::function<double(double x, double y, const Direction& s)>;

/// Source f and inflow data u_in, both functions of position and ordinate.
struct ProblemData {
  DirectionalFunction source;
  DirectionalFunction inflow;
};

/// Per-ordinate broken coefficient vectors.
struct RadianceField {
  std::vector<std::vector<double>> ordinates;

  static RadianceField zeros(std::size_t num_ordinates, std::size_t ndof);
  std::size_t size() const { return ordinates.size(); }
  std::vector<double>& operator[](std::size_t m) { return ordinates[m]; }
  const std::vector<double>& operator[](std::size_t m) const { return ordinates[m]; }
};

/// Linear system of one ordinate. The scattering term is not part of the
/// matrix: a lagged source q is added to the right side as source_test * q,
/// where q holds the coefficients of sigma_s * K_d u at the previous iterate.
struct DirectionSystem {
  int m = 0;
  SchemeKind scheme;
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::shared_ptr<const SparseMatrix> source_test;
  std::shared_ptr<const SparseMatrix> mass;
  BlockStructure blocks;
};

/// Throws ValidationError unless sigma_t - sigma_s * max_m b_m > 0.
void require_positive_margin(const ScatterKernel& kernel);

DirectionSystem assemble_wg(const Discretization& disc, const ProblemData& data, int m);
DirectionSystem assemble_dodg(const Discretization& disc, const ProblemData& data, int m, double cp);
DirectionSystem assemble_dodsd(const Discretization& disc, const ProblemData& data, int m, double c);
DirectionSystem assemble(const Discretization& disc, const SchemeKind& scheme, const ProblemData& data, int m);
std::vector<DirectionSystem> assemble_all(const Discretization& disc, const SchemeKind& scheme,
                                          const ProblemData& data);

/// Block-diagonal mass matrix of the broken space.
SparseMatrix assemble_mass(const Discretization& disc);

/// Full angular-weighted bilinear form sum_m w_m (A_c + A_st)(u^m, v^m),
/// scattering included, evaluated matrix-free by quadrature.
double eval_bilinear(const Discretization& disc, const SchemeKind& scheme, const RadianceField& u,
                     const RadianceField& v);

/// Same form through the assembled per-ordinate matrices plus the coupled
/// scattering term; cross-check for eval_bilinear.
double eval_bilinear_assembled(const Discretization& disc, const std::vector<DirectionSystem>& systems,
                               const RadianceField& u, const RadianceField& v);

/// sum_m w_m F^s(v^m), matrix-free.
double eval_linear(const Discretization& disc, const SchemeKind& scheme, const ProblemData& data,
                   const RadianceField& v);

/// Scheme norm: sum_m w_m ( sum_T ||v||_T^2 + || |s.n|^(1/2) (v - {v}) ||_dT^2
///                         + || |s.n|^(1/2) v ||_{dOmega}^2 ).
double triple_norm(const Discretization& disc, const RadianceField& field);

/// (sum_m w_m sum_T ||v^m||_T^2)^(1/2)
double l2_dom_norm(const Discretization& disc, const RadianceField& field);

}  // namespace dowg
