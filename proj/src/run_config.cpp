#include "biharm/run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "biharm/domain_io.hpp"
#include "biharm/error.hpp"
#include "biharm/parallel.hpp"
#include "biharm/report.hpp"
#include "biharm/trial_family.hpp"

namespace biharm {
namespace {

const std::vector<std::pair<std::string, Command>> kCommands{{"spectrum", Command::Spectrum},
                                                            {"inequality", Command::Inequality},
                                                            {"construct", Command::Construct},
                                                            {"converge", Command::Converge},
                                                            {"kernel", Command::Kernel}};

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string joined(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>) {
      s += g17(xs[i]);
    } else {
      s += std::to_string(xs[i]);
    }
  }
  return s;
}

struct Parser {
  CLI::App app{"Biharmonic Dirichlet and Neumann eigenvalues on rectilinear domains", "biharm"};
  RunConfig c;
  std::string command;
  std::string domain;
  std::string theorem = "thm1";
  std::string bc = "dirichlet";
  std::string family = "borsuk";
  std::string report;
  std::string csv;
  bool no_replay = false;

  Parser() {
    std::vector<std::string> names;
    for (const auto& [n, _] : kCommands) names.push_back(n);
    app.add_option("command", command, "spectrum | inequality | construct | converge | kernel")
        ->required()
        ->check(CLI::IsMember(names));
    app.add_option("--domain", domain, "Domain spec file");
    app.add_option("--refine", c.refinement, "Refinement factor r (cells per base cell edge)")
        ->check(CLI::PositiveNumber);
    app.add_option("--kmax", c.k_max, "Largest k for inequality checks")->check(CLI::PositiveNumber);
    app.add_option("--theorem", theorem, "thm1 (shift d), thm2 (shift d+1) or provenzano (shift 2)")
        ->check(CLI::IsMember({"thm1", "thm2", "provenzano"}));
    app.add_option("--bc", bc, "dirichlet or neumann")->check(CLI::IsMember({"dirichlet", "neumann"}));
    app.add_option("--count", c.count, "Number of eigenpairs (spectrum)")->check(CLI::PositiveNumber);
    app.add_option("--index", c.index, "Eigenvalue index (converge, construct)")->check(CLI::PositiveNumber);
    app.add_option("--ladder", c.ladder, "Refinement ladder, comma separated (converge)")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    app.add_option("--family", family, "borsuk or symmetric (construct)")
        ->check(CLI::IsMember({"borsuk", "symmetric"}));
    app.add_option("--seed", c.seed, "Direction of the first Borsuk frequency, comma separated")->delimiter(',');
    app.add_flag("--full-replay", c.full_replay, "Replay the trial-subspace bound for every k");
    app.add_flag("--no-replay", no_replay, "Skip the trial-subspace replay");
    app.add_option("--report", report, "Write the JSON report here");
    app.add_option("--csv", csv, "Write k,lambda_k,mu_k_plus_shift,margin rows here (inequality)");
    app.add_option("--tol-margin", c.tol_margin, "Relative margin tolerance")->check(CLI::PositiveNumber);
    app.add_option("--solver-tol", c.solver_tolerance, "Eigensolver relative tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--replay-tol", c.replay_tolerance, "Allowed relative excess of the replayed bound")
        ->check(CLI::PositiveNumber);
    app.add_option("--rank-tol", c.rank_tolerance, "Relative Gram rank threshold")->check(CLI::PositiveNumber);
    app.add_option("--kernel-tol", c.kernel_tolerance, "Absolute bound on stiffness times kernel interpolants")
        ->check(CLI::PositiveNumber);
  }
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::KernelDefect:
      return kExitVerdictFailed;
    case ErrorCode::MassNotPD:
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::NoZeroFound:
    case ErrorCode::NotOdd:
    case ErrorCode::RankDeficientSubspace:
    case ErrorCode::ZeroVector:
    case ErrorCode::MeshMismatch:
      return kExitSolverFailure;
    default:
      return kExitInputError;
  }
}

void write_report(const RunConfig& cfg, nlohmann::json body) {
  if (cfg.report_path.empty()) return;
  body["command"] = to_string(cfg.command);
  body["arguments"] = to_args(cfg);
  write_file(cfg.report_path, body.dump(2) + "\n");
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [n, cmd] : kCommands)
    if (cmd == c) return n;
  return "unknown";
}

std::string usage() {
  Parser p;
  return p.app.help();
}

RunConfig parse_args(const std::vector<std::string>& args, bool* help_requested) {
  if (help_requested) *help_requested = false;
  Parser p;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    p.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    if (help_requested) *help_requested = true;
    throw Error(ErrorCode::ParseError, p.app.help());
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  RunConfig c = p.c;
  for (const auto& [n, cmd] : kCommands)
    if (n == p.command) c.command = cmd;
  c.domain_file = p.domain;
  c.theorem = parse_theorem(p.theorem);
  c.bc = p.bc == "neumann" ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
  c.family = p.family == "symmetric" ? FamilyChoice::Symmetric : FamilyChoice::Borsuk;
  c.report_path = p.report;
  c.csv_path = p.csv;
  c.replay = !p.no_replay;
  if (c.seed.size() > 3) throw Error(ErrorCode::ParseError, "--seed takes at most 3 components");
  return c;
}

std::vector<std::string> to_args(const RunConfig& c) {
  std::vector<std::string> a{to_string(c.command)};
  auto opt = [&](const char* name, const std::string& value) {
    a.emplace_back(name);
    a.push_back(value);
  };
  if (!c.domain_file.empty()) opt("--domain", c.domain_file.string());
  opt("--refine", std::to_string(c.refinement));
  opt("--kmax", std::to_string(c.k_max));
  opt("--theorem", to_string(c.theorem));
  opt("--bc", c.bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet");
  opt("--count", std::to_string(c.count));
  opt("--index", std::to_string(c.index));
  if (!c.ladder.empty()) opt("--ladder", joined(c.ladder));
  opt("--family", c.family == FamilyChoice::Symmetric ? "symmetric" : "borsuk");
  if (!c.seed.empty()) opt("--seed", joined(c.seed));
  if (c.full_replay) a.emplace_back("--full-replay");
  if (!c.replay) a.emplace_back("--no-replay");
  if (!c.report_path.empty()) opt("--report", c.report_path.string());
  if (!c.csv_path.empty()) opt("--csv", c.csv_path.string());
  opt("--tol-margin", g17(c.tol_margin));
  opt("--solver-tol", g17(c.solver_tolerance));
  opt("--replay-tol", g17(c.replay_tolerance));
  opt("--rank-tol", g17(c.rank_tolerance));
  opt("--kernel-tol", g17(c.kernel_tolerance));
  return a;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.domain_file.empty()) throw Error(ErrorCode::ParseError, "--domain is required");
  const RectilinearDomain dom = build_domain(read_domain_file(cfg.domain_file));
  ComputeOptions compute;
  compute.solver.tolerance = cfg.solver_tolerance;

  FamilyOptions fam_opt;
  if (!cfg.seed.empty()) {
    if (static_cast<int>(cfg.seed.size()) != dom.dimension())
      throw Error(ErrorCode::ParseError, "--seed needs one component per dimension");
    for (std::size_t a = 0; a < cfg.seed.size(); ++a) fam_opt.seed_direction[a] = cfg.seed[a];
  }

  switch (cfg.command) {
    case Command::Spectrum: {
      const SpectrumResult s =
          compute_spectrum(dom, cfg.refinement, cfg.bc, static_cast<std::size_t>(cfg.count), compute);
      out << format_text(s);
      write_report(cfg, {{"domain", to_json(dom.description())}, {"spectrum", to_json(s)}});
      return kExitOk;
    }
    case Command::Inequality: {
      InequalityOptions opt;
      opt.tol_margin_relative = cfg.tol_margin;
      opt.replay = cfg.replay;
      opt.full_replay = cfg.full_replay;
      opt.replay_tolerance = cfg.replay_tolerance;
      opt.rank_tolerance = cfg.rank_tolerance;
      opt.kernel_tolerance = cfg.kernel_tolerance;
      opt.family = fam_opt;
      opt.compute = compute;
      const InequalityReport rep = check_inequality(dom, cfg.refinement, cfg.k_max, cfg.theorem, opt);
      out << format_text(rep);
      if (!cfg.csv_path.empty()) emit_csv(rep, cfg.csv_path);
      write_report(cfg, to_json(rep));
      if (!rep.verdicts_pass()) err << "inequality verdict failed\n";
      if (!rep.replays_pass()) err << "trial-subspace replay failed\n";
      if (!rep.nesting_ok()) err << "nesting mu_k <= lambda_k violated\n";
      return rep.verdicts_pass() && rep.replays_pass() && rep.nesting_ok() ? kExitOk : kExitVerdictFailed;
    }
    case Command::Construct: {
      const SpectrumResult s = compute_spectrum(dom, cfg.refinement, BoundaryCondition::Dirichlet,
                                                static_cast<std::size_t>(cfg.index), compute);
      const double lambda = s.eigenvalues.back();
      const TrialFamily fam = cfg.family == FamilyChoice::Symmetric
                                  ? symmetric_family(dom, lambda, detect_symmetry_frame(dom), fam_opt)
                                  : borsuk_family(dom, lambda, fam_opt);
      const IdentityReport ids = check_identities(fam, dom);
      out << format_text(fam, &ids);
      write_report(cfg, {{"domain", to_json(dom.description())},
                         {"lambda_source", s.mesh_id},
                         {"index", cfg.index},
                         {"family", to_json(fam)},
                         {"identities", to_json(ids)}});
      return kExitOk;
    }
    case Command::Converge: {
      const ConvergenceRecord rec = convergence_study(dom, cfg.bc, cfg.index, cfg.ladder, compute);
      out << format_text(rec);
      write_report(cfg, {{"domain", to_json(dom.description())}, {"convergence", to_json(rec)}});
      if (!rec.monotone) err << "eigenvalue not monotone under refinement\n";
      return rec.monotone ? kExitOk : kExitVerdictFailed;
    }
    case Command::Kernel: {
      const KernelSummary k = kernel_check(dom, cfg.refinement, compute, cfg.kernel_tolerance);
      out << format_text(k);
      write_report(cfg, {{"domain", to_json(dom.description())}, {"kernel", to_json(k)}});
      return kExitOk;
    }
  }
  return kExitInputError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (const char* t = std::getenv("BIHARM_THREADS")) {
    const int n = std::atoi(t);
    if (n > 0) set_thread_count(n);
  }
  RunConfig cfg;
  bool help = false;
  try {
    cfg = parse_args(args, &help);
  } catch (const Error& e) {
    if (help) {
      out << e.what();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  try {
    return execute(cfg, out, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitSolverFailure;
  }
}

}  // namespace biharm
