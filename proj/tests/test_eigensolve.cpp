#include <doctest.h>

#include <cmath>

#include "biharm/assembly.hpp"
#include "biharm/eigensolve.hpp"
#include "biharm/error.hpp"
#include "biharm/mesh.hpp"

using namespace biharm;

namespace {

struct Pencil {
  MeshDofSystem mesh;
  SparseSymMatrix A, M;
};

Pencil pencil(const DomainDescription& desc, int r, BoundaryCondition bc) {
  auto mesh = build_mesh(build_domain(desc), r, bc);
  auto A = assemble_hessian(mesh);
  auto M = assemble_mass(mesh);
  return {std::move(mesh), std::move(A), std::move(M)};
}

void check_pairs(const Pencil& p, const SpectrumResult& s) {
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
    CAPTURE(j);
    if (j > 0) CHECK(s.eigenvalues[j] >= s.eigenvalues[j - 1]);
    CHECK(proxy_residual(p.A, p.M, s.eigenvectors[j], s.eigenvalues[j]) <= 1e-8 * (1.0 + s.eigenvalues[j]));
    for (std::size_t i = 0; i <= j; ++i) {
      const double g = s.eigenvectors[i].dot(p.M.entries * s.eigenvectors[j]);
      CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
  }
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("identity pencil") {
  const auto p = pencil(unit_square_description(false), 3, BoundaryCondition::Neumann);
  const auto s = solve_lowest(p.M, p.M, 3);
  REQUIRE(s.eigenvalues.size() == 3);
  for (double v : s.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Neumann kernel is deflated") {
  const auto p = pencil(unit_square_description(false), 4, BoundaryCondition::Neumann);
  const auto kb = make_kernel_basis(p.mesh);
  const auto s = solve_lowest(p.A, p.M, 4, &kb);
  REQUIRE(s.eigenvalues.size() == 4);
  CHECK(s.kernel_dimension == 3);
  for (int j = 0; j < 3; ++j) CHECK(s.eigenvalues[j] == 0.0);
  CHECK(s.eigenvalues[3] > 1.0);
  check_pairs(p, s);
}

TEST_CASE("undeflated Neumann solve finds the kernel numerically") {
  const auto p = pencil(unit_square_description(false), 4, BoundaryCondition::Neumann);
  const auto s = solve_lowest(p.A, p.M, 4);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(s.eigenvalues[j]) <= 1e-8 * s.eigenvalues[3]);
}

TEST_CASE("dense and sparse paths agree") {
  const auto p = pencil(l_shape_description(), 12, BoundaryCondition::Dirichlet);
  const auto dense = solve_lowest(p.A, p.M, 6);
  SolverOptions opt;
  opt.dense_threshold = 0;
  const auto sparse = solve_lowest(p.A, p.M, 6, nullptr, opt);
  CHECK(dense.method == "dense");
  CHECK(sparse.method == "block-krylov-shift-invert");
  for (int j = 0; j < 6; ++j) CHECK(sparse.eigenvalues[j] == doctest::Approx(dense.eigenvalues[j]).epsilon(1e-10));
  check_pairs(p, dense);
  check_pairs(p, sparse);
}

TEST_CASE("sparse path with deflation") {
  const auto p = pencil(rectangle_description(2, 1, false), 12, BoundaryCondition::Neumann);
  const auto kb = make_kernel_basis(p.mesh);
  const auto dense = solve_lowest(p.A, p.M, 8, &kb);
  SolverOptions opt;
  opt.dense_threshold = 0;
  const auto sparse = solve_lowest(p.A, p.M, 8, &kb, opt);
  for (int j = 0; j < 8; ++j) CHECK(sparse.eigenvalues[j] == doctest::Approx(dense.eigenvalues[j]).epsilon(1e-10));
  check_pairs(p, sparse);
}

TEST_CASE("clamped square eigenvalue decreases under refinement") {
  std::vector<double> v;
  for (int r : {8, 16, 32}) {
    const auto p = pencil(unit_square_description(false), r, BoundaryCondition::Dirichlet);
    const auto s = solve_lowest(p.A, p.M, 1);
    check_pairs(p, s);
    v.push_back(s.eigenvalues[0]);
  }
  CHECK(v[0] > v[1]);
  CHECK(v[1] > v[2]);
  CHECK(v[2] == doctest::Approx(1294.93).epsilon(1e-4));
}

TEST_CASE("Rayleigh quotient") {
  const auto p = pencil(unit_square_description(false), 8, BoundaryCondition::Neumann);
  const auto kb = make_kernel_basis(p.mesh);
  CHECK(std::abs(rayleigh_quotient(p.A, p.M, kb.members[0])) <= 1e-10);
  const auto s = solve_lowest(p.A, p.M, 6, &kb);
  CHECK(rayleigh_quotient(p.A, p.M, s.eigenvectors[4]) == doctest::Approx(s.eigenvalues[4]).epsilon(1e-10));
  const Eigen::VectorXd x = s.eigenvectors[3] + s.eigenvectors[4];
  CHECK(rayleigh_quotient(p.A, p.M, x) ==
        doctest::Approx(0.5 * (s.eigenvalues[3] + s.eigenvalues[4])).epsilon(1e-9));
  CHECK(code_of([&] { rayleigh_quotient(p.A, p.M, Eigen::VectorXd::Zero(p.A.order())); }) == ErrorCode::ZeroVector);
}

TEST_CASE("Gram rank") {
  const auto p = pencil(unit_square_description(false), 4, BoundaryCondition::Neumann);
  const auto kb = make_kernel_basis(p.mesh);
  CHECK(gram_rank(p.M, {kb.members[1], kb.members[1]}, 1e-8) == 1);
  CHECK(gram_rank(p.M, kb.members, 1e-8) == 3);
  std::vector<Eigen::VectorXd> dep = kb.members;
  dep.push_back(2.0 * kb.members[0] - kb.members[2]);
  CHECK(gram_rank(p.M, dep, 1e-8) == 3);
}

TEST_CASE("solver input errors") {
  const auto p = pencil(unit_square_description(false), 2, BoundaryCondition::Neumann);
  CHECK(code_of([&] { solve_lowest(p.A, p.M, 1000); }) == ErrorCode::CountTooLarge);
  const auto q = pencil(unit_square_description(false), 3, BoundaryCondition::Neumann);
  CHECK(code_of([&] { solve_lowest(p.A, q.M, 1); }) == ErrorCode::MeshMismatch);
  SparseSymMatrix neg = p.M;
  neg.entries *= -1.0;
  CHECK(code_of([&] { solve_lowest(p.A, neg, 1); }) == ErrorCode::MassNotPD);
  SolverOptions bad;
  bad.shift = 0.0;
  CHECK_THROWS_AS(solve_lowest(p.A, p.M, 1, nullptr, bad), std::invalid_argument);
}

TEST_CASE("eigenvectors are orthogonal to the deflated kernel") {
  const auto p = pencil(l_shape_description(), 12, BoundaryCondition::Neumann);
  const auto kb = make_kernel_basis(p.mesh);
  SolverOptions opt;
  opt.dense_threshold = 0;
  const auto s = solve_lowest(p.A, p.M, 10, &kb, opt);
  for (std::size_t j = 3; j < s.eigenvectors.size(); ++j) {
    for (const auto& z : kb.members) {
      const double zn = std::sqrt(p.M.quadratic_form(z));
      CHECK(std::abs(z.dot(p.M.entries * s.eigenvectors[j])) / zn <= 1e-10);
    }
  }
}

TEST_CASE("repeated solves are bitwise identical") {
  const auto p = pencil(l_shape_description(), 12, BoundaryCondition::Dirichlet);
  SolverOptions opt;
  opt.dense_threshold = 0;
  const auto a = solve_lowest(p.A, p.M, 5, nullptr, opt);
  const auto b = solve_lowest(p.A, p.M, 5, nullptr, opt);
  CHECK(a.eigenvalues == b.eigenvalues);
  const auto c = solve_lowest(p.A, p.M, 5);
  const auto d = solve_lowest(p.A, p.M, 5);
  CHECK(c.eigenvalues == d.eigenvalues);
}
