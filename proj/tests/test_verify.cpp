#include <doctest.h>

#include <cmath>

#include "biharm/error.hpp"
#include "biharm/verify.hpp"

using namespace biharm;

namespace {

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

TEST_CASE("theorem names and shifts") {
  for (Theorem t : {Theorem::Thm1, Theorem::Thm2, Theorem::Provenzano}) CHECK(parse_theorem(to_string(t)) == t);
  CHECK(theorem_shift(Theorem::Thm1, 2) == 2);
  CHECK(theorem_shift(Theorem::Thm1, 3) == 3);
  CHECK(theorem_shift(Theorem::Thm2, 2) == 3);
  CHECK(theorem_shift(Theorem::Thm2, 3) == 4);
  CHECK(theorem_shift(Theorem::Provenzano, 3) == 2);
  CHECK(theorem_label(Theorem::Thm2) == "Thm2_shift_d_plus_1");
  CHECK(code_of([] { parse_theorem("thm3"); }) == ErrorCode::ParseError);
}

TEST_CASE("spectrum kernel facts") {
  const auto sq = build_domain(unit_square_description(false));
  const auto n = compute_spectrum(sq, 8, BoundaryCondition::Neumann, 5);
  for (int j = 0; j < 3; ++j) CHECK(n.eigenvalues[j] == 0.0);
  CHECK(n.eigenvalues[3] > 0.0);
  CHECK(compute_spectrum(sq, 8, BoundaryCondition::Dirichlet, 1).eigenvalues[0] > 0.0);

  const auto cube = build_domain(unit_cube_description(true));
  const auto c = compute_spectrum(cube, 2, BoundaryCondition::Neumann, 6);
  for (int j = 0; j < 4; ++j) CHECK(c.eigenvalues[j] == 0.0);
  CHECK(c.eigenvalues[4] > 0.0);
}

TEST_CASE("kernel check") {
  for (const auto& desc : {unit_square_description(false), rectangle_description(2, 1, false)}) {
    const auto k = kernel_check(build_domain(desc), 8);
    CHECK(k.pass);
    REQUIRE(k.ratio.has_value());
    CHECK(*k.ratio <= 1e-8);
    CHECK(k.stiffness_norms.size() == 3);
    for (double v : k.stiffness_norms) CHECK(v <= 1e-10);
  }
}

TEST_CASE("kernel check detects a corrupted constraint mask") {
  const auto sq = build_domain(unit_square_description(false));
  const auto mesh = build_mesh(sq, 4, BoundaryCondition::Neumann);
  std::vector<bool> mask = mesh.dirichlet_mask();
  // Pin the x1-slope of an interior node: x1 is no longer representable.
  for (std::size_t node = 0; node < mesh.node_count(); ++node) {
    if (!mesh.node_on_boundary()[node]) {
      mask[mesh.global_dof(node, 1)] = true;
      break;
    }
  }
  const auto bad = mesh.with_mask(mask);
  CHECK_FALSE(kernel_stiffness_summary(bad).pass);
  CHECK(code_of([&] { kernel_check(bad); }) == ErrorCode::KernelDefect);
}

TEST_CASE("inequality on the square") {
  const auto sq = build_domain(unit_square_description(false));
  InequalityOptions opt;
  opt.full_replay = true;
  const auto rep = check_inequality(sq, 16, 10, Theorem::Thm2, opt);
  REQUIRE(rep.rows.size() == 10);
  CHECK(rep.shift == 3);
  CHECK(rep.verdicts_pass());
  CHECK(rep.replays_pass());
  CHECK(rep.nesting_ok());
  CHECK(rep.kernel.pass);
  CHECK(rep.replays.size() == 10);
  for (const auto& row : rep.rows) {
    CHECK(row.margin == row.lambda - row.mu);
    CHECK(row.margin > 0.0);
  }
  for (const auto& rr : rep.replays) {
    CHECK(rr.family == FamilyKind::SymmetricTrig);
    CHECK(rr.gram_rank == rr.expected_rank);
    CHECK(rr.excess <= 1e-5);
  }
}

TEST_CASE("inequality on the L-shape") {
  const auto ell = build_domain(l_shape_description());
  const auto rep = check_inequality(ell, 12, 8, Theorem::Provenzano);
  CHECK(rep.verdicts_pass());
  for (const auto& row : rep.rows) CHECK(row.margin > 0.0);
  CHECK(rep.replays.size() == 3);
  for (const auto& rr : rep.replays) CHECK(rr.family == FamilyKind::BorsukSine);
  CHECK(code_of([&] { check_inequality(ell, 12, 8, Theorem::Thm2); }) == ErrorCode::SymmetryMissing);
}

TEST_CASE("inequality in three dimensions") {
  const auto cube = build_domain(unit_cube_description(true));
  InequalityOptions opt;
  opt.replay_ks = {1};
  const auto pair = compute_pair(cube, 3, 2, 4);
  for (Theorem t : {Theorem::Thm1, Theorem::Thm2}) {
    const auto rep = evaluate_inequality(cube, pair, 2, t, opt);
    CHECK(rep.shift == theorem_shift(t, 3));
    CHECK(rep.verdicts_pass());
    CHECK(rep.replays_pass());
  }
}

TEST_CASE("a failing verdict is reported") {
  const auto sq = build_domain(unit_square_description(false));
  InequalityOptions opt;
  opt.replay = false;
  auto pair = compute_pair(sq, 8, 4, 3);
  pair.neumann.eigenvalues[5] = pair.dirichlet.eigenvalues[2] * 1.01;
  const auto rep = evaluate_inequality(sq, pair, 4, Theorem::Thm2, opt);
  CHECK_FALSE(rep.verdicts_pass());
  CHECK_FALSE(rep.rows[2].pass);
  CHECK(rep.rows[1].pass);
  CHECK(rep.replays.empty());
}

TEST_CASE("convergence studies") {
  const auto sq = build_domain(unit_square_description(false));
  const auto d = convergence_study(sq, BoundaryCondition::Dirichlet, 1, {8, 16, 32});
  CHECK(d.monotone);
  CHECK(d.order > 3.5);
  CHECK(d.order < 4.5);
  CHECK(d.limit_change <= 1e-4);
  CHECK(d.limit <= d.values.back());

  const auto n = convergence_study(sq, BoundaryCondition::Neumann, 4, {8, 16, 32});
  CHECK(n.limit > 0.0);
  CHECK(n.order >= 2.0);

  const auto ell = build_domain(l_shape_description());
  const auto l = convergence_study(ell, BoundaryCondition::Dirichlet, 1, {4, 8, 16});
  CHECK(l.order < 4.0);
  CHECK(l.monotone);

  CHECK(code_of([&] { convergence_study(sq, BoundaryCondition::Dirichlet, 1, {8, 16}); }) ==
        ErrorCode::NonMonotoneLadder);
  CHECK(code_of([&] { convergence_study(sq, BoundaryCondition::Dirichlet, 1, {8, 4, 16}); }) ==
        ErrorCode::NonMonotoneLadder);
}
