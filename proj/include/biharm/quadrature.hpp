#pragma once

#include <functional>
#include <vector>

#include "biharm/domain.hpp"

namespace biharm {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre1D gauss_legendre(int points);

/// Tensor Gauss rule on one cell of edge length `cell_size`. Each axis of the
/// cell is split into `subdivisions` equal intervals carrying
/// `points_per_axis` Gauss points each, so the rule stays a tensor product.
/// Offsets are relative to the lower cell corner; weights sum to the cell
/// volume. Exact for tensor polynomials of per-axis degree
/// <= 2 * points_per_axis - 1.
struct QuadratureRule {
  int dimension = 2;
  int points_per_axis = 4;
  int subdivisions = 1;
  double cell_size = 1.0;
  std::vector<Point> offsets;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

QuadratureRule make_quadrature(int dimension, int points_per_axis, double cell_size,
                               int subdivisions = 1);

/// Subdivision count per axis that keeps |omega| * (cell_size / s) <= 2, the
/// regime where a 12-point rule resolves sin/cos factors to rounding.
int trig_subdivisions(double cell_size, double max_frequency);

using ScalarField = std::function<double(const Point&)>;

/// Sum over cells (lattice order) of weighted node values (tensor order).
/// The rule's cell_size must equal the domain cell size. Throws NonFiniteValue
/// if f produces a non-finite number.
double integrate(const RectilinearDomain& dom, const ScalarField& f, const QuadratureRule& rule);

/// Same as integrate() restricted to the given subset of domain cells.
double integrate_cells(const RectilinearDomain& dom, const std::vector<LatticeIndex>& cells,
                       const ScalarField& f, const QuadratureRule& rule);

/// Flattened quadrature nodes over the whole domain, in the same order the
/// integrator visits them. Lets callers evaluate several integrands on one
/// point set.
struct DomainSamples {
  std::vector<Point> points;
  std::vector<double> weights;
};

DomainSamples sample_domain(const RectilinearDomain& dom, const QuadratureRule& rule);

}  // namespace biharm
