#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dowg/angular.hpp"

namespace dowg {

/// Local face numbering of an axis-aligned cell.
enum Face : int { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

inline constexpr std::array<std::array<double, 2>, 4> kFaceNormal{{{-1.0, 0.0}, {1.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}}};

inline constexpr int opposite_face(int f) { return f ^ 1; }

enum class BoundaryTag : std::int8_t { Interior, Left, Right, Bottom, Top };

struct Cell {
  std::array<double, 2> lower{};  // (x0, y0)
  std::array<double, 2> upper{};  // (x1, y1)
  std::array<int, 4> edge{};      // global edge id per local face
  std::array<int, 4> neighbor{};  // neighbor cell per local face, -1 on the boundary

  double area() const { return (upper[0] - lower[0]) * (upper[1] - lower[1]); }
};

/// An edge is owned by cells[0]; `normal` is the outward normal of cells[0].
/// For interior edges cells[1] sees -normal.
struct Edge {
  std::array<double, 2> p0{};
  std::array<double, 2> p1{};
  std::array<int, 2> cells{-1, -1};
  std::array<int, 2> local_face{-1, -1};
  std::array<double, 2> normal{};
  BoundaryTag tag = BoundaryTag::Interior;

  bool interior() const { return cells[1] >= 0; }
  double length() const;
};

/// Uniform n x n partition of the unit square, n = 2^level.
struct QuadMesh {
  int level = 0;
  int n = 0;
  double h = 0.0;
  std::vector<Cell> cells;
  std::vector<Edge> edges;

  std::size_t num_cells() const { return cells.size(); }
  int cell_index(int i, int j) const { return j * n + i; }
  std::size_t num_interior_edges() const;
  std::size_t num_boundary_edges() const;
};

/// Throws std::invalid_argument unless 1 <= level <= 10.
QuadMesh build_mesh(int level);

/// Inflow/outflow split of every cell boundary for one ordinate. A face with
/// s.n < 0 is inflow; s.n == 0 counts as outflow.
struct DirectionalEdgeSets {
  Direction direction;
  std::vector<std::array<bool, 4>> inflow;  // per cell, per local face
  std::vector<int> inflow_boundary;         // boundary edges with s.n < 0
  std::vector<int> outflow_boundary;

  bool is_inflow(int cell, int face) const { return inflow[cell][face]; }
  bool is_outflow(int cell, int face) const { return !inflow[cell][face]; }
};

DirectionalEdgeSets classify_edges(const QuadMesh& mesh, const Direction& direction);

/// Signed flux factor s.n of a local face.
inline double face_flux(const Direction& s, int face) {
  return s.unit[0] * kFaceNormal[face][0] + s.unit[1] * kFaceNormal[face][1];
}

/// True when s.n counts as inflow. Normally the strict `s.n < 0`; the
/// selftest can inject a wrong tie rule through `testing::Mutations`.
bool is_inflow_flux(double sn);

/// Cells ordered by increasing s . centroid, a valid upwind-first order.
std::vector<int> sweep_order(const QuadMesh& mesh, const Direction& direction);

/// Plain text dump: one line per cell with its corners, then the edge list.
void write_mesh(std::ostream& out, const QuadMesh& mesh);

}  // namespace dowg
