#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "biharm/assembly.hpp"
#include "biharm/domain.hpp"
#include "biharm/error.hpp"
#include "biharm/hermite.hpp"
#include "biharm/mesh.hpp"
#include "biharm/parallel.hpp"
#include "biharm/quadrature.hpp"

using namespace biharm;

namespace {

const RectilinearDomain& square() {
  static const auto d = build_domain(unit_square_description(false));
  return d;
}

HermiteField sin3x() {
  return [](const Point& x, const MultiIndex& a) {
    if (a[1] != 0 || a[2] != 0) return 0.0;
    const double s = std::sin(3 * x[0]), c = std::cos(3 * x[0]);
    switch (a[0]) {
      case 0: return s;
      case 1: return 3 * c;
      case 2: return -9 * s;
      default: return 27 * -c;
    }
  };
}

double l2_error(const MeshDofSystem& mesh, const HermiteField& f) {
  const Eigen::VectorXd g = interpolate_global(mesh, f);
  const auto rule = make_quadrature(2, 6, mesh.domain().cell_size(), mesh.refinement());
  return std::sqrt(integrate(
      mesh.domain(),
      [&](const Point& x) {
        const double e = evaluate(mesh, g, x) - f(x, {0, 0, 0});
        return e * e;
      },
      rule));
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 4, 12}) {
    const auto g = gauss_legendre(n);
    double w = 0.0, m = 0.0;
    for (int i = 0; i < n; ++i) {
      w += g.weights[i];
      m += g.weights[i] * std::pow(g.nodes[i], 2 * n - 2);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
  }
}

TEST_CASE("domain integration") {
  const auto rule = make_quadrature(2, 4, 1.0);
  CHECK(std::abs(integrate(square(), [](const Point&) { return 1.0; }, rule) - 1.0) <= 1e-15);

  const auto centered = build_domain(unit_square_description(true));
  const double odd = integrate(centered, [](const Point& x) { return std::sin(std::numbers::pi * x[0]); }, rule);
  CHECK(std::abs(odd) <= 1e-12);

  const auto r12 = make_quadrature(2, 12, 1.0);
  const double s2 = integrate(square(), [](const Point& x) { return std::pow(std::sin(3 * x[0]), 2); }, r12);
  CHECK(std::abs(s2 - (0.5 - std::sin(6.0) / 12.0)) <= 1e-10);

  const auto ell = build_domain(l_shape_description());
  CHECK(integrate(ell, [](const Point&) { return 1.0; }, rule) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("integration is additive over cell subsets") {
  const auto ell = build_domain(l_shape_description());
  const auto rule = make_quadrature(2, 5, 1.0);
  const ScalarField f = [](const Point& x) { return std::exp(x[0]) * std::cos(x[1]); };
  const auto& cells = ell.cells();
  const double whole = integrate(ell, f, rule);
  const double parts = integrate_cells(ell, {cells[0]}, f, rule) + integrate_cells(ell, {cells[1], cells[2]}, f, rule);
  CHECK(whole == doctest::Approx(parts).epsilon(1e-14));
}

TEST_CASE("integrand producing NaN is reported") {
  const auto rule = make_quadrature(2, 2, 1.0);
  try {
    integrate(square(), [](const Point&) { return std::nan(""); }, rule);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
  }
}

TEST_CASE("trig subdivisions resolve the frequency") {
  CHECK(trig_subdivisions(1.0, 1.0) == 1);
  CHECK(trig_subdivisions(1.0, 10.0) * 2 >= 10);
  const auto rule = make_quadrature(2, 3, 2.0, 4);
  double w = 0.0;
  for (double v : rule.weights) w += v;
  CHECK(w == doctest::Approx(4.0));
  CHECK(rule.size() == 144);
}

TEST_CASE("Hermite cardinality") {
  const Cell cell{2, {0, 0, 0}, 1.0};
  const int dpn = dofs_per_node(2);
  const Point corners[4] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  const auto& orders = node_dof_orders(2);
  for (int c = 0; c < 4; ++c) {
    for (int nd = 0; nd < dpn; ++nd) {
      const int dof = c * dpn + nd;
      for (int c2 = 0; c2 < 4; ++c2) {
        for (int nd2 = 0; nd2 < dpn; ++nd2) {
          const double v = shape_eval(cell, dof, corners[c2], orders[nd2]);
          CHECK(v == doctest::Approx(c == c2 && nd == nd2 ? 1.0 : 0.0).epsilon(1e-14));
        }
      }
    }
  }
  CHECK(shape_eval(cell, 1, corners[0], {1, 0, 0}) == doctest::Approx(1.0));
  CHECK(shape_eval(cell, 1, corners[0], {0, 0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("Hermite derivatives match finite differences") {
  const double h = 0.3, t = 0.37, e = 1e-6;
  for (int b = 0; b < 4; ++b) {
    for (int der = 0; der < 3; ++der) {
      const double fd = (hermite_1d(b, t + e / h, h, der) - hermite_1d(b, t - e / h, h, der)) / (2 * e);
      CHECK(hermite_1d(b, t, h, der + 1) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("bad multi-indices are rejected") {
  const Cell cell{2, {0, 0, 0}, 1.0};
  for (MultiIndex bad : {MultiIndex{-1, 0, 0}, MultiIndex{0, 0, 1}, MultiIndex{2, 1, 0}}) {
    try {
      shape_eval(cell, 0, {0.5, 0.5, 0}, bad);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadMultiIndex);
    }
  }
}

TEST_CASE("mesh dof counts") {
  const auto n1 = build_mesh(square(), 1, BoundaryCondition::Neumann);
  CHECK(n1.node_count() == 4);
  CHECK(n1.dof_count() == 16);
  CHECK(n1.free_count() == 16);
  CHECK(build_mesh(square(), 1, BoundaryCondition::Dirichlet).free_count() == 0);

  const auto d4 = build_mesh(square(), 4, BoundaryCondition::Dirichlet);
  CHECK(d4.node_count() == 25);
  CHECK(d4.free_count() == 36);

  const auto cube = build_mesh(build_domain(unit_cube_description(true)), 2, BoundaryCondition::Neumann);
  CHECK(cube.dof_count() == 27 * 8);

  try {
    build_mesh(square(), 1000, BoundaryCondition::Neumann, MeshOptions{1000});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RefinementOverflow);
  }
  CHECK_THROWS_AS(build_mesh(square(), 0, BoundaryCondition::Neumann), std::invalid_argument);
}

TEST_CASE("Dirichlet free dofs are a subset of Neumann free dofs") {
  const auto ell = build_domain(l_shape_description());
  const auto d = build_mesh(ell, 4, BoundaryCondition::Dirichlet);
  const auto n = build_mesh(ell, 4, BoundaryCondition::Neumann);
  CHECK(d.same_discretization(n));
  for (std::size_t g : d.free_dofs()) CHECK(n.free_index()[g] >= 0);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(d.free_count()), 1.0, 2.0);
  CHECK(d.restrict_to_free(d.expand(v)) == v);
}

TEST_CASE("point location") {
  const auto m = build_mesh(square(), 4, BoundaryCondition::Neumann);
  CHECK(m.locate({0.1, 0.1, 0}) == 0);
  CHECK(m.locate({1.0, 1.0, 0}) >= 0);
  CHECK(m.locate({1.5, 0.5, 0}) == -1);
}

TEST_CASE("interpolation of constants and coordinates") {
  const auto m = build_mesh(square(), 3, BoundaryCondition::Neumann);
  const Eigen::VectorXd one = interpolate_global(m, constant_field(1.0));
  const Eigen::VectorXd x2 = interpolate_global(m, coordinate_field(1));
  for (std::size_t node = 0; node < m.node_count(); ++node) {
    CHECK(one[m.global_dof(node, 0)] == 1.0);
    CHECK(x2[m.global_dof(node, 0)] == doctest::Approx(m.node_point(node)[1]));
    for (int nd = 1; nd < m.dofs_per_node(); ++nd) CHECK(one[m.global_dof(node, nd)] == 0.0);
    CHECK(x2[m.global_dof(node, 1)] == 0.0);
    CHECK(x2[m.global_dof(node, 2)] == 1.0);
    CHECK(x2[m.global_dof(node, 3)] == 0.0);
  }
  CHECK(evaluate(m, x2, {0.31, 0.77, 0}) == doctest::Approx(0.77).epsilon(1e-14));
  CHECK(evaluate(m, x2, {0.31, 0.77, 0}, {0, 1, 0}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("interpolation error decays at fourth order") {
  std::vector<double> err;
  for (int r : {2, 4, 8}) err.push_back(l2_error(build_mesh(square(), r, BoundaryCondition::Neumann), sin3x()));
  const double p1 = std::log2(err[0] / err[1]);
  const double p2 = std::log2(err[1] / err[2]);
  CHECK(p1 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(p2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Hessian form on polynomials") {
  const auto m = build_mesh(square(), 4, BoundaryCondition::Neumann);
  const auto A = assemble_hessian(m);
  const double scale = A.entries.norm();
  CHECK(std::abs(A.quadratic_form(interpolate(m, coordinate_field(0)))) <= 1e-12 * scale);
  CHECK(std::abs(A.quadratic_form(interpolate(m, constant_field(1.0)))) <= 1e-12 * scale);
  CHECK(A.quadratic_form(interpolate(m, monomial_field({1, 1, 0}))) == doctest::Approx(2.0).epsilon(1e-12));
  // |D^2 (x^2)|^2 = 4
  CHECK(A.quadratic_form(interpolate(m, monomial_field({2, 0, 0}))) == doctest::Approx(4.0).epsilon(1e-12));

  const Eigen::MatrixXd dense = Eigen::MatrixXd(A.entries);
  CHECK((dense - dense.transpose()).norm() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("mass form") {
  const auto m = build_mesh(square(), 4, BoundaryCondition::Neumann);
  const auto M = assemble_mass(m);
  CHECK(M.quadratic_form(interpolate(m, constant_field(1.0))) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(M.quadratic_form(interpolate(m, coordinate_field(0))) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(M.entries);
  CHECK(llt.info() == Eigen::Success);

  const auto cube = build_domain(unit_cube_description(false));
  const auto m3 = build_mesh(cube, 2, BoundaryCondition::Neumann);
  CHECK(assemble_mass(m3).quadratic_form(interpolate(m3, constant_field(1.0))) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(assemble_hessian(m3).quadratic_form(interpolate(m3, monomial_field({1, 0, 1}))) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("local matrices are symmetric") {
  for (int d : {2, 3}) {
    const Eigen::MatrixXd K = local_hessian_matrix(d, 0.25);
    const Eigen::MatrixXd M = local_mass_matrix(d, 0.25);
    CHECK(K.rows() == local_dof_count(d));
    CHECK((K - K.transpose()).norm() == 0.0);
    CHECK((M - M.transpose()).norm() == 0.0);
  }
}

TEST_CASE("assembly is independent of the thread count") {
  const auto ell = build_domain(l_shape_description());
  const auto m = build_mesh(ell, 12, BoundaryCondition::Neumann);
  set_thread_count(1);
  const auto A1 = assemble_hessian(m);
  set_thread_count(4);
  const auto A4 = assemble_hessian(m);
  set_thread_count(1);
  CHECK(Eigen::MatrixXd(A1.entries - A4.entries).cwiseAbs().maxCoeff() == 0.0);
}
