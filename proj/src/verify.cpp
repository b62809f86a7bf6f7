#include "biharm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "biharm/assembly.hpp"
#include "biharm/error.hpp"

namespace biharm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SolveDiagnostics diagnostics(const MeshDofSystem& mesh, const SpectrumResult& s, double seconds) {
  SolveDiagnostics d;
  d.mesh_id = mesh.mesh_id();
  d.free_dofs = mesh.free_count();
  d.method = s.method;
  d.iterations = s.iterations;
  d.max_residual = s.max_residual();
  d.trailing_gap = s.trailing_gap;
  d.seconds = seconds;
  return d;
}

std::vector<ReflectionMap> require_frame(const RectilinearDomain& dom) {
  const auto frame = detect_symmetry_frame(dom);
  std::set<int> axes;
  for (const auto& m : frame) axes.insert(m.axis);
  if (static_cast<int>(axes.size()) < dom.dimension() - 1) {
    std::ostringstream msg;
    msg << "domain '" << dom.name() << "' has reflection symmetry in " << axes.size() << " axes, need "
        << dom.dimension() - 1;
    throw Error(ErrorCode::SymmetryMissing, msg.str());
  }
  return frame;
}

std::vector<int> replay_set(int k_max, const InequalityOptions& opt) {
  std::set<int> ks;
  if (!opt.replay_ks.empty()) {
    ks.insert(opt.replay_ks.begin(), opt.replay_ks.end());
  } else if (opt.full_replay) {
    for (int k = 1; k <= k_max; ++k) ks.insert(k);
  } else {
    ks = {1, 2, k_max};
  }
  std::vector<int> out;
  for (int k : ks)
    if (k >= 1 && k <= k_max) out.push_back(k);
  return out;
}

}  // namespace

const char* const kDiscreteCaveat =
    "Both spectra are conforming finite element upper bounds; a discrete pass is evidence, not proof, "
    "of the continuum inequality.";

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::Thm1: return "thm1";
    case Theorem::Thm2: return "thm2";
    case Theorem::Provenzano: return "provenzano";
  }
  return "unknown";
}

std::string theorem_label(Theorem t) {
  switch (t) {
    case Theorem::Thm1: return "Thm1_shift_d";
    case Theorem::Thm2: return "Thm2_shift_d_plus_1";
    case Theorem::Provenzano: return "Provenzano_shift_2";
  }
  return "unknown";
}

Theorem parse_theorem(const std::string& name) {
  for (Theorem t : {Theorem::Thm1, Theorem::Thm2, Theorem::Provenzano})
    if (name == to_string(t)) return t;
  throw Error(ErrorCode::ParseError, "unknown theorem '" + name + "' (expected thm1, thm2 or provenzano)");
}

int theorem_shift(Theorem t, int dimension) {
  switch (t) {
    case Theorem::Thm1: return dimension;
    case Theorem::Thm2: return dimension + 1;
    case Theorem::Provenzano: return 2;
  }
  return 0;
}

bool InequalityReport::verdicts_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const InequalityRow& r) { return r.pass; });
}

bool InequalityReport::replays_pass() const {
  return std::all_of(replays.begin(), replays.end(), [](const ReplayRecord& r) { return r.pass; });
}

SpectrumResult compute_spectrum(const MeshDofSystem& mesh, std::size_t count, const ComputeOptions& options) {
  const SparseSymMatrix A = assemble_hessian(mesh);
  const SparseSymMatrix M = assemble_mass(mesh);
  if (mesh.bc() == BoundaryCondition::Neumann) {
    const KernelBasis kernel = make_kernel_basis(mesh);
    return solve_lowest(A, M, count, &kernel, options.solver);
  }
  return solve_lowest(A, M, count, nullptr, options.solver);
}

SpectrumResult compute_spectrum(const RectilinearDomain& dom, int refinement, BoundaryCondition bc,
                                std::size_t count, const ComputeOptions& options) {
  return compute_spectrum(build_mesh(dom, refinement, bc, options.mesh), count, options);
}

KernelSummary kernel_stiffness_summary(const MeshDofSystem& neumann_mesh, double stiffness_tolerance) {
  KernelSummary s;
  s.stiffness_tolerance = stiffness_tolerance;
  s.mesh_id = neumann_mesh.mesh_id();
  s.dimension = neumann_mesh.dimension();
  const SparseSymMatrix A = assemble_hessian(neumann_mesh);
  const KernelBasis kernel = make_kernel_basis(neumann_mesh);
  for (const auto& z : kernel.members) s.stiffness_norms.push_back((A.entries * z).norm());
  s.pass = std::all_of(s.stiffness_norms.begin(), s.stiffness_norms.end(),
                       [&](double v) { return v <= s.stiffness_tolerance; });
  return s;
}

KernelSummary kernel_check(const MeshDofSystem& neumann_mesh, const ComputeOptions& options,
                           double stiffness_tolerance) {
  if (neumann_mesh.bc() != BoundaryCondition::Neumann)
    throw Error(ErrorCode::MeshMismatch, "kernel check needs a Neumann mesh");
  KernelSummary s = kernel_stiffness_summary(neumann_mesh, stiffness_tolerance);
  const int d = neumann_mesh.dimension();
  const SparseSymMatrix A = assemble_hessian(neumann_mesh);
  const SparseSymMatrix M = assemble_mass(neumann_mesh);
  const SpectrumResult raw = solve_lowest(A, M, static_cast<std::size_t>(d + 2), nullptr, options.solver);
  s.undeflated = raw.eigenvalues;
  const double first_positive = raw.eigenvalues[static_cast<std::size_t>(d + 1)];
  double top = 0.0;
  for (int j = 0; j <= d; ++j) top = std::max(top, std::abs(raw.eigenvalues[static_cast<std::size_t>(j)]));
  s.ratio = first_positive > 0.0 ? top / first_positive : std::numeric_limits<double>::infinity();
  const bool ratio_ok = *s.ratio <= s.ratio_tolerance;
  s.pass = s.pass && ratio_ok;
  if (!s.pass) {
    std::ostringstream msg;
    msg << "kernel defect on " << s.mesh_id << ": max |mu_j| / mu_" << d + 2 << " = " << *s.ratio
        << " (limit " << s.ratio_tolerance << "), stiffness norms";
    for (double v : s.stiffness_norms) msg << ' ' << v;
    msg << " (limit " << s.stiffness_tolerance << ")";
    throw Error(ErrorCode::KernelDefect, msg.str());
  }
  return s;
}

KernelSummary kernel_check(const RectilinearDomain& dom, int refinement, const ComputeOptions& options,
                           double stiffness_tolerance) {
  return kernel_check(build_mesh(dom, refinement, BoundaryCondition::Neumann, options.mesh), options,
                      stiffness_tolerance);
}

SpectrumPair compute_pair(const RectilinearDomain& dom, int refinement, int k_max, int max_shift,
                          const ComputeOptions& options) {
  if (k_max < 1) throw Error(ErrorCode::CountTooLarge, "k_max must be at least 1");
  SpectrumPair p{build_mesh(dom, refinement, BoundaryCondition::Dirichlet, options.mesh),
                 build_mesh(dom, refinement, BoundaryCondition::Neumann, options.mesh),
                 {},
                 {},
                 0.0,
                 0.0};
  auto t0 = Clock::now();
  p.dirichlet = compute_spectrum(p.dirichlet_mesh, static_cast<std::size_t>(k_max), options);
  p.dirichlet_seconds = seconds_since(t0);
  t0 = Clock::now();
  p.neumann = compute_spectrum(p.neumann_mesh, static_cast<std::size_t>(k_max + max_shift), options);
  p.neumann_seconds = seconds_since(t0);
  return p;
}

InequalityReport evaluate_inequality(const RectilinearDomain& dom, const SpectrumPair& spectra, int k_max,
                                     Theorem theorem, const InequalityOptions& options) {
  InequalityReport rep;
  rep.domain = dom.description();
  rep.refinement = spectra.dirichlet_mesh.refinement();
  rep.theorem = theorem;
  rep.shift = theorem_shift(theorem, dom.dimension());
  rep.k_max = k_max;
  rep.tol_margin_relative = options.tol_margin_relative;
  rep.replay_tolerance = options.replay_tolerance;
  rep.solver_tolerance = options.compute.solver.tolerance;
  if (theorem == Theorem::Thm2) rep.symmetry_frame = require_frame(dom);

  const auto& lam = spectra.dirichlet.eigenvalues;
  const auto& mu = spectra.neumann.eigenvalues;
  if (static_cast<int>(lam.size()) < k_max || static_cast<int>(mu.size()) < k_max + rep.shift) {
    std::ostringstream msg;
    msg << "spectra too short for k_max = " << k_max << " and shift " << rep.shift;
    throw Error(ErrorCode::CountTooLarge, msg.str());
  }
  for (int k = 1; k <= k_max; ++k) {
    InequalityRow row;
    row.k = k;
    const auto i = static_cast<std::size_t>(k - 1);
    const auto j = static_cast<std::size_t>(k - 1 + rep.shift);
    row.lambda = lam[i];
    row.mu = mu[j];
    row.margin = row.lambda - row.mu;
    row.tol_margin = options.tol_margin_relative * row.lambda;
    row.pass = row.margin >= -row.tol_margin;
    row.lambda_residual = spectra.dirichlet.residual_norms[i];
    row.mu_residual = spectra.neumann.residual_norms[j];
    rep.rows.push_back(row);
  }
  rep.nesting_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(lam.size(), mu.size()); ++k)
    rep.nesting_violation = std::max(rep.nesting_violation, (mu[k] - lam[k]) / lam[k]);

  rep.kernel = kernel_stiffness_summary(spectra.neumann_mesh, options.kernel_tolerance);
  rep.dirichlet = diagnostics(spectra.dirichlet_mesh, spectra.dirichlet, spectra.dirichlet_seconds);
  rep.neumann = diagnostics(spectra.neumann_mesh, spectra.neumann, spectra.neumann_seconds);

  if (options.replay) {
    const auto t0 = Clock::now();
    for (int k : replay_set(k_max, options)) {
      const double lambda = lam[static_cast<std::size_t>(k - 1)];
      const TrialFamily fam = theorem == Theorem::Thm2
                                  ? symmetric_family(dom, lambda, rep.symmetry_frame, options.family)
                                  : borsuk_family(dom, lambda, options.family);
      ReplayRecord rr;
      rr.k = k;
      rr.family = fam.kind;
      rr.lambda = lambda;
      rr.expected_rank = static_cast<std::size_t>(k) + fam.size();
      rr.orthogonality_residual = fam.max_orthogonality_residual();
      rr.members = fam.members;
      try {
        const SupRayleighResult s = subspace_sup_rayleigh(spectra.dirichlet, spectra.dirichlet_mesh, fam,
                                                          static_cast<std::size_t>(k), options.rank_tolerance);
        rr.sup = s.sup;
        rr.gram_rank = s.gram_rank;
        rr.cross_term_residual = s.cross_term_residual;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficientSubspace) throw;
        rr.sup = std::numeric_limits<double>::quiet_NaN();
        rr.gram_rank = 0;
      }
      rr.excess = rr.sup / lambda - 1.0;
      rr.pass = rr.gram_rank == rr.expected_rank && rr.sup <= lambda * (1.0 + options.replay_tolerance);
      rep.replays.push_back(rr);
    }
    rep.replay_seconds = seconds_since(t0);
  }
  return rep;
}

InequalityReport check_inequality(const RectilinearDomain& dom, int refinement, int k_max, Theorem theorem,
                                  const InequalityOptions& options) {
  if (theorem == Theorem::Thm2) require_frame(dom);
  const SpectrumPair p =
      compute_pair(dom, refinement, k_max, theorem_shift(theorem, dom.dimension()), options.compute);
  return evaluate_inequality(dom, p, k_max, theorem, options);
}

ConvergenceRecord convergence_study(const RectilinearDomain& dom, BoundaryCondition bc, int index,
                                    const std::vector<int>& ladder, const ComputeOptions& options) {
  if (ladder.size() < 3) throw Error(ErrorCode::NonMonotoneLadder, "ladder needs at least 3 refinements");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1 || (i > 0 && ladder[i] <= ladder[i - 1]))
      throw Error(ErrorCode::NonMonotoneLadder, "ladder must be strictly increasing and positive");
  }
  if (index < 1) throw Error(ErrorCode::CountTooLarge, "eigenvalue index must be at least 1");

  ConvergenceRecord rec;
  rec.domain_name = dom.name();
  rec.bc = bc;
  rec.index = index;
  rec.ladder = ladder;
  for (int r : ladder) {
    const SpectrumResult s = compute_spectrum(dom, r, bc, static_cast<std::size_t>(index), options);
    rec.values.push_back(s.eigenvalues.back());
    rec.residuals.push_back(s.residual_norms.back());
  }

  const std::size_t n = ladder.size();
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = rec.values[i] - rec.values[i + 1];
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const double ratio = static_cast<double>(ladder[i + 1]) / ladder[i];
    rec.orders.push_back(std::log(std::abs(delta[i]) / std::abs(delta[i + 1])) / std::log(ratio));
  }
  rec.order = rec.orders.back();

  // log|delta_i| = a - p log r_i
  {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(n - 1);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      xs.push_back(std::log(static_cast<double>(ladder[i])));
      ys.push_back(std::log(std::abs(delta[i])));
      sx += xs.back();
      sy += ys.back();
      sxx += xs.back() * xs.back();
      sxy += xs.back() * ys.back();
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icept = (sy - slope * sx) / m;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (icept + slope * xs[i]);
      ss += e * e;
    }
    rec.fit_residual = std::sqrt(ss);
  }

  auto extrapolate = [&](std::size_t i, double p) {
    const double ratio = static_cast<double>(ladder[i + 1]) / ladder[i];
    return rec.values[i + 1] + (rec.values[i + 1] - rec.values[i]) / (std::pow(ratio, p) - 1.0);
  };
  // With the observed order from the same three levels, the last two
  // estimates coincide by construction; the nominal order keeps them apart.
  for (std::size_t i = 0; i + 1 < n; ++i) rec.richardson.push_back(extrapolate(i, rec.nominal_order));
  rec.limit = extrapolate(n - 2, rec.order);
  const double last = rec.richardson.back();
  const double prev = rec.richardson[rec.richardson.size() - 2];
  rec.limit_change = std::abs(last - prev) / std::abs(last);

  rec.monotone = true;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (rec.values[i + 1] > rec.values[i] + 1e-9 * std::abs(rec.values[i])) rec.monotone = false;
  return rec;
}

}  // namespace biharm
