#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "biharm/mesh.hpp"
#include "biharm/verify.hpp"

namespace biharm {

enum class Command { Spectrum, Inequality, Construct, Converge, Kernel };
std::string to_string(Command c);

enum class FamilyChoice { Borsuk, Symmetric };

/// Everything a command-line run needs. Defaults match the library defaults.
struct RunConfig {
  Command command = Command::Spectrum;
  std::filesystem::path domain_file;
  int refinement = 16;
  int k_max = 10;
  Theorem theorem = Theorem::Thm1;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  /// Eigenpairs for `spectrum`.
  int count = 10;
  /// Eigenvalue index for `converge`, target index for `construct`.
  int index = 1;
  std::vector<int> ladder{8, 16, 32};
  FamilyChoice family = FamilyChoice::Borsuk;
  /// Empty: first coordinate axis.
  std::vector<double> seed;
  bool full_replay = false;
  bool replay = true;
  std::filesystem::path report_path;  // JSON, optional
  std::filesystem::path csv_path;     // inequality only, optional
  double tol_margin = 1e-9;
  double solver_tolerance = 1e-10;
  double replay_tolerance = 1e-5;
  double rank_tolerance = 1e-8;
  double kernel_tolerance = 1e-10;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitInputError = 4;

/// Parses arguments (without the program name). Unknown options, missing
/// values and non-positive numbers raise ParseError; `--help` raises
/// ParseError with the usage text and sets `help_requested`.
RunConfig parse_args(const std::vector<std::string>& args, bool* help_requested = nullptr);
/// Inverse of parse_args: parse_args(to_args(c)) == c.
std::vector<std::string> to_args(const RunConfig& config);

/// Usage text.
std::string usage();

/// Executes the configured command, printing the text report to `out` and
/// diagnostics to `err`. Returns one of the exit codes above.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + execute with exception-to-exit-code mapping. Reads the
/// worker count from BIHARM_THREADS.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biharm
