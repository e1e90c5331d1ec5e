#include "dowg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dowg/mutations.hpp"

namespace dowg {

namespace testing {
Mutations& mutations() {
  static Mutations m;
  return m;
}
}  // namespace testing

double Edge::length() const { return std::hypot(p1[0] - p0[0], p1[1] - p0[1]); }

std::size_t QuadMesh::num_interior_edges() const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.interior(); }));
}

std::size_t QuadMesh::num_boundary_edges() const { return edges.size() - num_interior_edges(); }

QuadMesh build_mesh(int level) {
  if (level < 1 || level > 10) throw std::invalid_argument("build_mesh: level must be in [1, 10], got " + std::to_string(level));
  QuadMesh mesh;
  mesh.level = level;
  mesh.n = 1 << level;
  mesh.h = 1.0 / mesh.n;
  const int n = mesh.n;
  const double h = mesh.h;

  mesh.cells.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Cell& c = mesh.cells[mesh.cell_index(i, j)];
      c.lower = {i * h, j * h};
      c.upper = {(i + 1) * h, (j + 1) * h};
      c.neighbor = {i > 0 ? mesh.cell_index(i - 1, j) : -1, i < n - 1 ? mesh.cell_index(i + 1, j) : -1,
                    j > 0 ? mesh.cell_index(i, j - 1) : -1, j < n - 1 ? mesh.cell_index(i, j + 1) : -1};
    }
  }

  // Vertical edges x = i*h, owned by the cell on their left (or right on x = 0).
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= n; ++i) {
      Edge e;
      e.p0 = {i * h, j * h};
      e.p1 = {i * h, (j + 1) * h};
      if (i == 0) {
        e.cells = {mesh.cell_index(0, j), -1};
        e.local_face = {kLeft, -1};
        e.normal = {-1.0, 0.0};
        e.tag = BoundaryTag::Left;
      } else if (i == n) {
        e.cells = {mesh.cell_index(n - 1, j), -1};
        e.local_face = {kRight, -1};
        e.normal = {1.0, 0.0};
        e.tag = BoundaryTag::Right;
      } else {
        e.cells = {mesh.cell_index(i - 1, j), mesh.cell_index(i, j)};
        e.local_face = {kRight, kLeft};
        e.normal = {1.0, 0.0};
      }
      const int id = static_cast<int>(mesh.edges.size());
      mesh.edges.push_back(e);
      for (int s = 0; s < 2; ++s)
        if (e.cells[s] >= 0) mesh.cells[e.cells[s]].edge[e.local_face[s]] = id;
    }
  }
  // Horizontal edges y = j*h.
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) {
      Edge e;
      e.p0 = {i * h, j * h};
      e.p1 = {(i + 1) * h, j * h};
      if (j == 0) {
        e.cells = {mesh.cell_index(i, 0), -1};
        e.local_face = {kBottom, -1};
        e.normal = {0.0, -1.0};
        e.tag = BoundaryTag::Bottom;
      } else if (j == n) {
        e.cells = {mesh.cell_index(i, n - 1), -1};
        e.local_face = {kTop, -1};
        e.normal = {0.0, 1.0};
        e.tag = BoundaryTag::Top;
      } else {
        e.cells = {mesh.cell_index(i, j - 1), mesh.cell_index(i, j)};
        e.local_face = {kTop, kBottom};
        e.normal = {0.0, 1.0};
      }
      const int id = static_cast<int>(mesh.edges.size());
      mesh.edges.push_back(e);
      for (int s = 0; s < 2; ++s)
        if (e.cells[s] >= 0) mesh.cells[e.cells[s]].edge[e.local_face[s]] = id;
    }
  }
  return mesh;
}

bool is_inflow_flux(double sn) {
  if (testing::mutations().tie_as_inflow) return sn <= 0.0;
  return sn < 0.0;
}

DirectionalEdgeSets classify_edges(const QuadMesh& mesh, const Direction& direction) {
  DirectionalEdgeSets sets;
  sets.direction = direction;
  sets.inflow.resize(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int f = 0; f < 4; ++f) sets.inflow[c][f] = is_inflow_flux(face_flux(direction, f));
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.interior()) continue;
    const double sn = direction.unit[0] * edge.normal[0] + direction.unit[1] * edge.normal[1];
    (is_inflow_flux(sn) ? sets.inflow_boundary : sets.outflow_boundary).push_back(static_cast<int>(e));
  }
  return sets;
}

std::vector<int> sweep_order(const QuadMesh& mesh, const Direction& direction) {
  std::vector<int> order(mesh.num_cells());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> key(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells[c];
    const double cx = 0.5 * (cell.lower[0] + cell.upper[0]);
    const double cy = 0.5 * (cell.lower[1] + cell.upper[1]);
    key[c] = direction.unit[0] * cx + direction.unit[1] * cy;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
  return order;
}

void write_mesh(std::ostream& out, const QuadMesh& mesh) {
  out << "# level " << mesh.level << " n " << mesh.n << " h " << mesh.h << "\n";
  out << "cells " << mesh.num_cells() << "\n";
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell& cell = mesh.cells[c];
    out << c << ' ' << cell.lower[0] << ' ' << cell.lower[1] << ' ' << cell.upper[0] << ' ' << cell.lower[1] << ' '
        << cell.upper[0] << ' ' << cell.upper[1] << ' ' << cell.lower[0] << ' ' << cell.upper[1] << "\n";
  }
  out << "edges " << mesh.edges.size() << "\n";
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& edge = mesh.edges[e];
    out << e << ' ' << edge.p0[0] << ' ' << edge.p0[1] << ' ' << edge.p1[0] << ' ' << edge.p1[1] << ' ' << edge.cells[0]
        << ' ' << edge.cells[1] << "\n";
  }
}

}  // namespace dowg
