#include "biharm/hermite.hpp"

#include <stdexcept>

#include "biharm/error.hpp"

namespace biharm {

int dofs_per_node(int dimension) { return 1 << dimension; }
int corners_per_cell(int dimension) { return 1 << dimension; }
int local_dof_count(int dimension) { return dofs_per_node(dimension) * corners_per_cell(dimension); }

const std::vector<MultiIndex>& node_dof_orders(int dimension) {
  static const std::vector<MultiIndex> two_d{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  static const std::vector<MultiIndex> three_d{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                               {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  if (dimension == 2) return two_d;
  if (dimension == 3) return three_d;
  throw Error(ErrorCode::BadDimension, "Hermite element supports dimension 2 or 3");
}

double hermite_1d(int basis, double t, double h, int derivative) {
  // Reference polynomials on [0,1]; slope functions carry a factor h so the
  // physical derivative at the node equals one.
  const double t2 = t * t;
  const double t3 = t2 * t;
  double v = 0.0;
  switch (basis) {
    case 0:
      switch (derivative) {
        case 0: v = 1.0 - 3.0 * t2 + 2.0 * t3; break;
        case 1: v = -6.0 * t + 6.0 * t2; break;
        case 2: v = -6.0 + 12.0 * t; break;
        case 3: v = 12.0; break;
        default: v = 0.0;
      }
      break;
    case 1:
      switch (derivative) {
        case 0: v = t - 2.0 * t2 + t3; break;
        case 1: v = 1.0 - 4.0 * t + 3.0 * t2; break;
        case 2: v = -4.0 + 6.0 * t; break;
        case 3: v = 6.0; break;
        default: v = 0.0;
      }
      v *= h;
      break;
    case 2:
      switch (derivative) {
        case 0: v = 3.0 * t2 - 2.0 * t3; break;
        case 1: v = 6.0 * t - 6.0 * t2; break;
        case 2: v = 6.0 - 12.0 * t; break;
        case 3: v = -12.0; break;
        default: v = 0.0;
      }
      break;
    case 3:
      switch (derivative) {
        case 0: v = -t2 + t3; break;
        case 1: v = -2.0 * t + 3.0 * t2; break;
        case 2: v = -2.0 + 6.0 * t; break;
        case 3: v = 6.0; break;
        default: v = 0.0;
      }
      v *= h;
      break;
    default:
      throw std::out_of_range("hermite_1d: basis index must be 0..3");
  }
  for (int k = 0; k < derivative; ++k) v /= h;
  return v;
}

std::array<int, 3> local_axis_basis(int dimension, int local_dof) {
  const int dpn = dofs_per_node(dimension);
  const int corner = local_dof / dpn;
  const MultiIndex& alpha = node_dof_orders(dimension)[local_dof % dpn];
  std::array<int, 3> b{0, 0, 0};
  for (int a = 0; a < dimension; ++a) b[a] = 2 * ((corner >> a) & 1) + alpha[a];
  return b;
}

double shape_eval(const Cell& cell, int local_dof, const Point& x, const MultiIndex& derivative) {
  int order = 0;
  for (int a = 0; a < 3; ++a) {
    if (derivative[a] < 0 || (a >= cell.dimension && derivative[a] != 0)) {
      throw Error(ErrorCode::BadMultiIndex, "derivative multi-index has invalid entries");
    }
    order += derivative[a];
  }
  if (order > 2) throw Error(ErrorCode::BadMultiIndex, "derivative order exceeds 2");
  if (local_dof < 0 || local_dof >= local_dof_count(cell.dimension)) {
    throw std::out_of_range("shape_eval: local dof out of range");
  }
  const auto b = local_axis_basis(cell.dimension, local_dof);
  double v = 1.0;
  for (int a = 0; a < cell.dimension; ++a) {
    const double t = (x[a] - cell.origin[a]) / cell.size;
    v *= hermite_1d(b[a], t, cell.size, derivative[a]);
  }
  return v;
}

Hermite1DTable::Hermite1DTable(std::vector<double> reference_points, double cell_size)
    : h(cell_size), t(std::move(reference_points)), values(t.size()) {
  for (std::size_t p = 0; p < t.size(); ++p) {
    for (int b = 0; b < 4; ++b) {
      for (int d = 0; d < 3; ++d) values[p][b][d] = hermite_1d(b, t[p], h, d);
    }
  }
}

}  // namespace biharm
