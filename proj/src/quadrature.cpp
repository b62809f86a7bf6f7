#include "biharm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "biharm/error.hpp"
#include "biharm/parallel.hpp"

namespace biharm {

GaussLegendre1D gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  GaussLegendre1D rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule make_quadrature(int dimension, int points_per_axis, double cell_size,
                               int subdivisions) {
  if (dimension < 1 || dimension > 3) {
    throw Error(ErrorCode::BadDimension, "quadrature dimension must be 1, 2 or 3");
  }
  if (points_per_axis < 1 || subdivisions < 1 || !(cell_size > 0.0)) {
    throw std::invalid_argument("make_quadrature: bad rule parameters");
  }
  const GaussLegendre1D g = gauss_legendre(points_per_axis);
  const double sub = cell_size / subdivisions;

  std::vector<double> x1;
  std::vector<double> w1;
  for (int s = 0; s < subdivisions; ++s) {
    for (int q = 0; q < points_per_axis; ++q) {
      x1.push_back(sub * (s + 0.5 * (g.nodes[q] + 1.0)));
      w1.push_back(0.5 * sub * g.weights[q]);
    }
  }

  QuadratureRule rule;
  rule.dimension = dimension;
  rule.points_per_axis = points_per_axis;
  rule.subdivisions = subdivisions;
  rule.cell_size = cell_size;
  const std::size_t m = x1.size();
  const std::size_t nz = dimension == 3 ? m : 1;
  const std::size_t ny = dimension >= 2 ? m : 1;
  // Tensor order: the first axis varies fastest.
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        Point p{x1[i], dimension >= 2 ? x1[j] : 0.0, dimension == 3 ? x1[k] : 0.0};
        double w = w1[i];
        if (dimension >= 2) w *= w1[j];
        if (dimension == 3) w *= w1[k];
        rule.offsets.push_back(p);
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

int trig_subdivisions(double cell_size, double max_frequency) {
  const double s = std::ceil(std::abs(max_frequency) * cell_size / 2.0);
  return std::max(1, static_cast<int>(s));
}

namespace {

void check_rule(const RectilinearDomain& dom, const QuadratureRule& rule) {
  if (rule.dimension != dom.dimension() ||
      std::abs(rule.cell_size - dom.cell_size()) > 1e-14 * dom.cell_size()) {
    throw Error(ErrorCode::MeshMismatch, "quadrature rule does not match the domain cells");
  }
}

double cell_sum(const RectilinearDomain& dom, const LatticeIndex& cell, const ScalarField& f,
                const QuadratureRule& rule) {
  const Point o = dom.cell_origin(cell);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    Point x{o[0] + rule.offsets[q][0], o[1] + rule.offsets[q][1], o[2] + rule.offsets[q][2]};
    for (int a = dom.dimension(); a < 3; ++a) x[a] = 0.0;
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "integrand is not finite at a quadrature node");
    }
    s += rule.weights[q] * v;
  }
  return s;
}

}  // namespace

double integrate(const RectilinearDomain& dom, const ScalarField& f, const QuadratureRule& rule) {
  return integrate_cells(dom, dom.cells(), f, rule);
}

double integrate_cells(const RectilinearDomain& dom, const std::vector<LatticeIndex>& cells,
                       const ScalarField& f, const QuadratureRule& rule) {
  check_rule(dom, rule);
  return chunked_sum(cells.size(), [&](std::size_t i) { return cell_sum(dom, cells[i], f, rule); });
}

DomainSamples sample_domain(const RectilinearDomain& dom, const QuadratureRule& rule) {
  check_rule(dom, rule);
  DomainSamples s;
  s.points.reserve(dom.cells().size() * rule.size());
  s.weights.reserve(dom.cells().size() * rule.size());
  for (const auto& c : dom.cells()) {
    const Point o = dom.cell_origin(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Point x{};
      for (int a = 0; a < dom.dimension(); ++a) x[a] = o[a] + rule.offsets[q][a];
      s.points.push_back(x);
      s.weights.push_back(rule.weights[q]);
    }
  }
  return s;
}

}  // namespace biharm
