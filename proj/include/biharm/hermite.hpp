#pragma once

#include <array>
#include <vector>

#include "biharm/domain.hpp"

namespace biharm {

/// Per-axis derivative orders, e.g. {1,1,0} is d^2/dx1dx2.
using MultiIndex = std::array<int, 3>;

// Bogner-Fox-Schmit element: tensor product of 1D cubic Hermite functions.
// Each vertex carries the value and every mixed derivative of order at most
// one per axis: 4 dofs in 2D (u, u_1, u_2, u_12), 8 in 3D (u, u_1, u_2, u_3,
// u_12, u_13, u_23, u_123). Local dof = corner * dofs_per_node + node_dof,
// where bit a of `corner` selects the lower/upper vertex along axis a.

int dofs_per_node(int dimension);
int corners_per_cell(int dimension);
int local_dof_count(int dimension);

/// Derivative multi-index carried by each node dof, in node-dof order.
const std::vector<MultiIndex>& node_dof_orders(int dimension);

/// 1D cubic Hermite basis on an interval of length h, reference coordinate
/// t in [0,1]. basis: 0 = value at t=0, 1 = slope at t=0, 2 = value at t=1,
/// 3 = slope at t=1. Returns the `derivative`-th derivative (0..3) with
/// respect to the physical coordinate.
double hermite_1d(int basis, double t, double h, int derivative);

/// A single axis-aligned cube cell.
struct Cell {
  int dimension = 2;
  Point origin{};
  double size = 1.0;
};

/// Value (or derivative, total order <= 2) of local basis function
/// `local_dof` of `cell` at physical point `x`. Throws BadMultiIndex for
/// negative entries, entries beyond the dimension, or total order > 2.
double shape_eval(const Cell& cell, int local_dof, const Point& x, const MultiIndex& derivative);

/// Tabulated 1D Hermite functions on a set of reference abscissae:
/// table[basis][point][derivative] for derivative 0..2.
struct Hermite1DTable {
  double h = 1.0;
  std::vector<double> t;
  std::vector<std::array<std::array<double, 3>, 4>> values;  // [point][basis][derivative]

  Hermite1DTable(std::vector<double> reference_points, double cell_size);
  double at(std::size_t point, int basis, int derivative) const { return values[point][basis][derivative]; }
};

/// Per-axis 1D basis index of a local dof.
std::array<int, 3> local_axis_basis(int dimension, int local_dof);

}  // namespace biharm
