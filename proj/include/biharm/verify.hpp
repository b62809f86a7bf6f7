#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biharm/domain.hpp"
#include "biharm/eigensolve.hpp"
#include "biharm/hybrid.hpp"
#include "biharm/mesh.hpp"
#include "biharm/trial_family.hpp"

namespace biharm {

/// Which Dirichlet-Neumann inequality mu_{k+shift} <= lambda_k is checked.
enum class Theorem {
  Thm1,        // shift d (2 in the plane)
  Thm2,        // shift d + 1, needs reflection symmetry in d - 1 axes
  Provenzano,  // shift 2
};

/// "thm1", "thm2", "provenzano".
std::string to_string(Theorem t);
/// "Thm1_shift_d", "Thm2_shift_d_plus_1", "Provenzano_shift_2".
std::string theorem_label(Theorem t);
/// Accepts the to_string() names. Throws ParseError.
Theorem parse_theorem(const std::string& name);
int theorem_shift(Theorem t, int dimension);

struct ComputeOptions {
  SolverOptions solver{};
  MeshOptions mesh{};
};

/// build_mesh -> assemble -> solve_lowest, deflating the kernel for Neumann.
SpectrumResult compute_spectrum(const MeshDofSystem& mesh, std::size_t count, const ComputeOptions& options = {});
SpectrumResult compute_spectrum(const RectilinearDomain& dom, int refinement, BoundaryCondition bc,
                                std::size_t count, const ComputeOptions& options = {});

struct KernelSummary {
  std::string mesh_id;
  int dimension = 2;
  /// ||A z|| for the interpolants z of 1, x_1, ..., x_d.
  std::vector<double> stiffness_norms;
  /// Lowest d + 2 eigenvalues of the undeflated Neumann pencil (kernel_check
  /// only).
  std::vector<double> undeflated;
  /// max_{j <= d+1} |mu_j| / mu_{d+2} (kernel_check only).
  std::optional<double> ratio;
  double ratio_tolerance = 1e-8;
  double stiffness_tolerance = 1e-10;
  bool pass = false;
};

/// Stiffness norms only; used inside inequality reports.
KernelSummary kernel_stiffness_summary(const MeshDofSystem& neumann_mesh, double stiffness_tolerance = 1e-10);

/// Undeflated solve plus stiffness norms. Throws KernelDefect when either
/// assertion fails; the message carries the offending numbers. The
/// stiffness norms are absolute, so their rounding floor grows like r^2.
KernelSummary kernel_check(const MeshDofSystem& neumann_mesh, const ComputeOptions& options = {},
                           double stiffness_tolerance = 1e-10);
KernelSummary kernel_check(const RectilinearDomain& dom, int refinement, const ComputeOptions& options = {},
                           double stiffness_tolerance = 1e-10);

struct InequalityRow {
  int k = 0;
  double lambda = 0.0;  // lambda_k^h
  double mu = 0.0;      // mu_{k+shift}^h
  double margin = 0.0;  // lambda - mu
  double tol_margin = 0.0;
  bool pass = false;
  double lambda_residual = 0.0;
  double mu_residual = 0.0;
};

/// Sup-Rayleigh replay over span{u_1..u_k} + trial family at lambda_k^h.
struct ReplayRecord {
  int k = 0;
  FamilyKind family = FamilyKind::BorsukSine;
  double lambda = 0.0;
  double sup = 0.0;
  /// sup / lambda - 1.
  double excess = 0.0;
  std::size_t gram_rank = 0;
  std::size_t expected_rank = 0;
  double orthogonality_residual = 0.0;
  double cross_term_residual = 0.0;
  std::vector<TrigMember> members;
  bool pass = false;
};

struct SolveDiagnostics {
  std::string mesh_id;
  std::size_t free_dofs = 0;
  std::string method;
  int iterations = 0;
  double max_residual = 0.0;
  double trailing_gap = 0.0;
  double seconds = 0.0;
};

struct InequalityReport {
  DomainDescription domain;
  int refinement = 1;
  Theorem theorem = Theorem::Thm1;
  int shift = 0;
  int k_max = 0;
  std::vector<InequalityRow> rows;
  std::vector<ReflectionMap> symmetry_frame;
  KernelSummary kernel;
  std::vector<ReplayRecord> replays;
  double replay_seconds = 0.0;
  SolveDiagnostics dirichlet;
  SolveDiagnostics neumann;
  /// max_k (mu_k - lambda_k) / lambda_k over the common range; <= 0 means
  /// exact nesting.
  double nesting_violation = 0.0;
  double nesting_tolerance = 1e-10;
  double tol_margin_relative = 1e-9;
  double replay_tolerance = 1e-5;
  double solver_tolerance = 0.0;

  bool verdicts_pass() const;
  bool replays_pass() const;
  bool nesting_ok() const { return nesting_violation <= nesting_tolerance; }
};

/// Header line every report carries.
extern const char* const kDiscreteCaveat;

struct InequalityOptions {
  /// Verdict passes iff margin >= -tol_margin_relative * lambda_k.
  double tol_margin_relative = 1e-9;
  bool replay = true;
  /// Replay every k instead of {1, 2, k_max}.
  bool full_replay = false;
  /// Explicit replay set; overrides the two settings above when non-empty.
  std::vector<int> replay_ks;
  double replay_tolerance = 1e-5;
  double rank_tolerance = 1e-8;
  double kernel_tolerance = 1e-10;
  FamilyOptions family{};
  ComputeOptions compute{};
};

/// Dirichlet and Neumann spectra on one refinement of one domain.
struct SpectrumPair {
  MeshDofSystem dirichlet_mesh;
  MeshDofSystem neumann_mesh;
  SpectrumResult dirichlet;
  SpectrumResult neumann;
  double dirichlet_seconds = 0.0;
  double neumann_seconds = 0.0;
};

/// lambda_1..lambda_{k_max} and mu_1..mu_{k_max + max_shift}.
SpectrumPair compute_pair(const RectilinearDomain& dom, int refinement, int k_max, int max_shift,
                          const ComputeOptions& options = {});

/// Verdicts for one theorem from precomputed spectra.
InequalityReport evaluate_inequality(const RectilinearDomain& dom, const SpectrumPair& spectra, int k_max,
                                     Theorem theorem, const InequalityOptions& options = {});

/// compute_pair + evaluate_inequality. Throws SymmetryMissing (Thm2 without
/// the frame) before any solve.
InequalityReport check_inequality(const RectilinearDomain& dom, int refinement, int k_max, Theorem theorem,
                                  const InequalityOptions& options = {});

struct ConvergenceRecord {
  std::string domain_name;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int index = 1;
  std::vector<int> ladder;
  std::vector<double> values;
  std::vector<double> residuals;
  /// Order from each consecutive triple (geometric ladders).
  std::vector<double> orders;
  /// Last entry of `orders`.
  double order = 0.0;
  /// Least-squares residual of log|theta_i - theta_{i+1}| against log r_i.
  double fit_residual = 0.0;
  /// Rate of the element on smooth eigenfunctions.
  double nominal_order = 4.0;
  /// Richardson estimate from each consecutive pair, with `nominal_order`.
  std::vector<double> richardson;
  /// Estimate at the finest pair with the observed `order`.
  double limit = 0.0;
  /// |R_last - R_prev| / |R_last| over `richardson`.
  double limit_change = 0.0;
  /// theta non-increasing in r within 1e-9 relative.
  bool monotone = false;
};

/// Throws NonMonotoneLadder when the ladder has fewer than 3 entries or is
/// not strictly increasing.
ConvergenceRecord convergence_study(const RectilinearDomain& dom, BoundaryCondition bc, int index,
                                    const std::vector<int>& ladder, const ComputeOptions& options = {});

}  // namespace biharm
